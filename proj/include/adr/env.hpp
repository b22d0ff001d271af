#pragma once

// Masked sequential-decision environment for multi-debris rendezvous. State
// transitions are pure: step() returns a new state and never mutates its
// input, so copying a MissionState is the sanctioned way to branch futures.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "adr/constants.hpp"
#include "adr/rendezvous.hpp"
#include "adr/rng.hpp"

namespace adr::env {

using astro::OrbitalElements;
using astro::TransferPlan;

inline OrbitalElements station_orbit_700_96() {
  OrbitalElements el;
  el.sma_km = kEarthRadiusKm + 700.0;
  el.ecc = 0.0;
  el.inc_deg = 96.0;
  return el;
}

struct MissionConfig {
  double dv_max_kms = 3.0;
  double mission_duration_s = 7.0 * kSecondsPerDay;
  int n_debris = 50;
  OrbitalElements station_orbit = station_orbit_700_96();
  OrbitalElements chaser_start = station_orbit_700_96();
  double refuel_service_time_s = 7200.0;
  double reward_rendezvous = 1.0;
  double penalty_refuel = -0.5;
  astro::RendezvousModel transfer_model{};
};

inline MissionConfig nominal_config() { return {}; }

inline MissionConfig desk_config(int n_debris = 10) {
  MissionConfig cfg;
  cfg.n_debris = n_debris;
  return cfg;
}

struct Debris {
  int id = 0;
  OrbitalElements elements;
  bool visited = false;
};

struct DebrisBounds {
  double alt_min_km = 700.0;
  double alt_max_km = 800.0;
  double inc_min_deg = 94.0;
  double inc_max_deg = 98.0;
  double ecc_max = 0.01;
  // Debris cluster near the station plane; RAAN is drawn from a band around
  // this center so plane changes stay within mission-scale budgets.
  double raan_center_deg = 0.0;
  double raan_halfwidth_deg = 3.0;
};

inline std::vector<Debris> generate_debris_field(std::uint64_t seed, int n,
                                                 const DebrisBounds& bounds = {}) {
  if (n < 0) throw std::invalid_argument("generate_debris_field: negative count");
  Rng rng(derive_seed(seed, 0xDEB));
  std::vector<Debris> field;
  field.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Debris d;
    d.id = i;
    d.elements.sma_km = kEarthRadiusKm + rng.uniform(bounds.alt_min_km, bounds.alt_max_km);
    d.elements.ecc = rng.uniform(0.0, bounds.ecc_max);
    d.elements.inc_deg = rng.uniform(bounds.inc_min_deg, bounds.inc_max_deg);
    d.elements.raan_deg = wrap_deg(bounds.raan_center_deg +
                                   rng.uniform(-bounds.raan_halfwidth_deg, bounds.raan_halfwidth_deg));
    d.elements.argp_deg = rng.uniform(0.0, 360.0);
    d.elements.anomaly_deg = rng.uniform(0.0, 360.0);
    d.elements.epoch_s = 0.0;
    astro::validate_elements(d.elements);
    field.push_back(d);
  }
  return field;
}

struct Action {
  enum class Kind { kRendezvous, kRefuel };
  Kind kind = Kind::kRendezvous;
  int debris_index = -1;

  static Action rendezvous(int k) { return {Kind::kRendezvous, k}; }
  static Action refuel() { return {Kind::kRefuel, -1}; }
};

// Action i in [0, n) targets debris i; action n is Refuel.
inline int action_to_index(const Action& a, int n_debris) {
  return a.kind == Action::Kind::kRefuel ? n_debris : a.debris_index;
}

inline Action action_from_index(int index, int n_debris) {
  if (index < 0 || index > n_debris)
    throw std::invalid_argument("action index out of range");
  return index == n_debris ? Action::refuel() : Action::rendezvous(index);
}

enum class TermReason { kNone, kAllVisited, kFuelExhausted, kTimeExhausted, kNoFeasibleAction };

inline const char* term_reason_label(TermReason r) {
  switch (r) {
    case TermReason::kNone: return "none";
    case TermReason::kAllVisited: return "all_visited";
    case TermReason::kFuelExhausted: return "fuel_exhausted";
    case TermReason::kTimeExhausted: return "time_exhausted";
    case TermReason::kNoFeasibleAction: return "no_feasible_action";
  }
  return "?";
}

struct MissionState {
  MissionConfig config;
  OrbitalElements chaser;
  double remaining_dv_kms = 0.0;
  double elapsed_s = 0.0;
  std::vector<Debris> debris;
  int visited_count = 0;
  int refuel_count = 0;
  bool at_station = true;
};

inline MissionState reset(const MissionConfig& config, std::uint64_t seed) {
  if (config.n_debris < 0) throw std::invalid_argument("reset: negative debris count");
  if (!(config.dv_max_kms > 0.0)) throw std::invalid_argument("reset: dv budget must be positive");
  if (!(config.mission_duration_s > 0.0))
    throw std::invalid_argument("reset: mission duration must be positive");
  astro::validate_elements(config.station_orbit);
  astro::validate_elements(config.chaser_start);
  MissionState s;
  s.config = config;
  s.chaser = config.chaser_start;
  s.remaining_dv_kms = config.dv_max_kms;
  s.elapsed_s = 0.0;
  DebrisBounds bounds;
  bounds.raan_center_deg = config.station_orbit.raan_deg;
  s.debris = generate_debris_field(seed, config.n_debris, bounds);
  return s;
}

// Transfer plan for an action from the current state. Visitation is encoded
// by the mask, not the cost: plans price visited debris like any other target.
inline TransferPlan action_cost(const MissionState& s, const Action& a) {
  if (a.kind == Action::Kind::kRefuel) {
    TransferPlan plan = astro::coelliptic_rendezvous_plan(s.chaser, s.config.station_orbit,
                                                          s.config.transfer_model);
    plan.add(astro::LegKind::kRefuelService, 0.0, s.config.refuel_service_time_s);
    return plan;
  }
  if (a.debris_index < 0 || a.debris_index >= static_cast<int>(s.debris.size()))
    throw std::invalid_argument("action_cost: debris index out of range");
  return astro::coelliptic_rendezvous_plan(s.chaser, s.debris[a.debris_index].elements,
                                           s.config.transfer_model);
}

inline bool plan_affordable(const MissionState& s, const TransferPlan& plan) {
  return plan.total_dv_kms <= s.remaining_dv_kms &&
         s.elapsed_s + plan.total_time_s <= s.config.mission_duration_s;
}

inline bool action_feasible(const MissionState& s, const Action& a) {
  if (a.kind == Action::Kind::kRefuel) {
    if (s.visited_count < 1) return false;
  } else {
    if (s.debris[a.debris_index].visited) return false;
  }
  return plan_affordable(s, action_cost(s, a));
}

inline std::vector<std::uint8_t> valid_action_mask(const MissionState& s) {
  const int n = static_cast<int>(s.debris.size());
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 0; i <= n; ++i)
    mask[static_cast<std::size_t>(i)] = action_feasible(s, action_from_index(i, n)) ? 1 : 0;
  return mask;
}

struct TerminalStatus {
  bool terminal = false;
  TermReason reason = TermReason::kNone;
};

inline TerminalStatus is_terminal(const MissionState& s) {
  if (s.visited_count == static_cast<int>(s.debris.size()))
    return {true, TermReason::kAllVisited};
  if (s.elapsed_s >= s.config.mission_duration_s)
    return {true, TermReason::kTimeExhausted};
  const auto mask = valid_action_mask(s);
  for (std::uint8_t m : mask)
    if (m) return {false, TermReason::kNone};
  if (s.remaining_dv_kms <= 1e-12) return {true, TermReason::kFuelExhausted};
  return {true, TermReason::kNoFeasibleAction};
}

struct StepResult {
  MissionState state;
  double reward = 0.0;
  bool terminated = false;
  TermReason reason = TermReason::kNone;
  double dv_spent_kms = 0.0;
  double time_spent_s = 0.0;
};

inline StepResult step(const MissionState& s, const Action& a) {
  const int n = static_cast<int>(s.debris.size());
  if (a.kind == Action::Kind::kRendezvous && (a.debris_index < 0 || a.debris_index >= n))
    throw std::invalid_argument("step: debris index out of range");
  if (!action_feasible(s, a)) throw std::invalid_argument("step: masked action");

  const TransferPlan plan = action_cost(s, a);
  StepResult res;
  res.state = s;
  res.dv_spent_kms = plan.total_dv_kms;
  res.time_spent_s = plan.total_time_s;
  res.state.remaining_dv_kms -= plan.total_dv_kms;
  res.state.elapsed_s += plan.total_time_s;
  if (a.kind == Action::Kind::kRefuel) {
    // The transfer draws on the old tank; the reset to a full tank follows.
    res.state.remaining_dv_kms = s.config.dv_max_kms;
    res.state.chaser = s.config.station_orbit;
    res.state.at_station = true;
    res.state.refuel_count += 1;
    res.reward = s.config.penalty_refuel;
  } else {
    Debris& d = res.state.debris[static_cast<std::size_t>(a.debris_index)];
    d.visited = true;
    res.state.chaser = d.elements;
    res.state.at_station = false;
    res.state.visited_count += 1;
    res.reward = s.config.reward_rendezvous;
  }
  const TerminalStatus term = is_terminal(res.state);
  res.terminated = term.terminal;
  res.reason = term.reason;
  return res;
}

inline std::size_t observation_size(int n_debris) {
  return 9 + 5 * static_cast<std::size_t>(n_debris);
}

// Fixed-length feature vector: 6 normalized chaser elements, remaining-dv
// fraction, remaining-time fraction, at-station flag, then per debris
// (d_sma/100 km, d_inc/4 deg, d_raan/360 deg, phase gap/360 deg, visited).
inline std::vector<double> observe(const MissionState& s) {
  std::vector<double> obs;
  obs.reserve(observation_size(static_cast<int>(s.debris.size())));
  const double t = s.elapsed_s;
  obs.push_back((s.chaser.sma_km - kEarthRadiusKm - 700.0) / 100.0);
  obs.push_back(s.chaser.ecc / 0.01);
  obs.push_back((s.chaser.inc_deg - 94.0) / 4.0);
  obs.push_back(s.chaser.raan_deg / 360.0);
  obs.push_back(s.chaser.argp_deg / 360.0);
  obs.push_back(astro::anomaly_at_deg(s.chaser, t) / 360.0);
  obs.push_back(s.remaining_dv_kms / s.config.dv_max_kms);
  obs.push_back((s.config.mission_duration_s - s.elapsed_s) / s.config.mission_duration_s);
  obs.push_back(s.at_station ? 1.0 : 0.0);
  for (const Debris& d : s.debris) {
    obs.push_back((d.elements.sma_km - s.chaser.sma_km) / 100.0);
    obs.push_back((d.elements.inc_deg - s.chaser.inc_deg) / 4.0);
    obs.push_back(wrap_deg_signed(d.elements.raan_deg - s.chaser.raan_deg) / 360.0);
    obs.push_back(astro::phase_gap_deg(s.chaser, d.elements, t) / 360.0);
    obs.push_back(d.visited ? 1.0 : 0.0);
  }
  return obs;
}

// Domain randomization draws, in order, dv_max ~ U[1, 3.5] km/s and
// mission duration ~ U[1, 7] days; everything else comes from `base`.
inline MissionConfig randomize_mission_config(Rng& rng, const MissionConfig& base) {
  MissionConfig cfg = base;
  cfg.dv_max_kms = rng.uniform(1.0, 3.5);
  cfg.mission_duration_s = rng.uniform(1.0, 7.0) * kSecondsPerDay;
  return cfg;
}

inline MissionConfig randomize_mission_config(Rng& rng) {
  return randomize_mission_config(rng, nominal_config());
}

}  // namespace adr::env
