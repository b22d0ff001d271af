#pragma once

// Co-elliptic rendezvous cost model. A transfer is priced as a fixed sequence
// of legs: rotate into the target plane, descend to an offset orbit below the
// target, coast until most of the along-track gap has drifted closed, ascend
// to the target altitude, then spend fixed closing and safety-ellipse budgets.

#include <stdexcept>
#include <string>
#include <vector>

#include "adr/orbit.hpp"

namespace adr::astro {

enum class LegKind {
  kPlaneChange,
  kHohmann1,
  kPhasingCoast,
  kHohmann2,
  kClosingBurn,
  kSafetyEllipse,
  kRefuelService,
};

inline const char* leg_label(LegKind k) {
  switch (k) {
    case LegKind::kPlaneChange: return "plane-change";
    case LegKind::kHohmann1: return "hohmann-1";
    case LegKind::kPhasingCoast: return "phasing-coast";
    case LegKind::kHohmann2: return "hohmann-2";
    case LegKind::kClosingBurn: return "closing-burn";
    case LegKind::kSafetyEllipse: return "safety-ellipse";
    case LegKind::kRefuelService: return "refuel-service";
  }
  return "?";
}

struct TransferLeg {
  LegKind kind;
  double dv_kms = 0.0;
  double duration_s = 0.0;
};

struct TransferPlan {
  std::vector<TransferLeg> legs;
  double total_dv_kms = 0.0;
  double total_time_s = 0.0;

  void add(LegKind kind, double dv_kms, double duration_s) {
    legs.push_back({kind, dv_kms, duration_s});
    total_dv_kms += dv_kms;
    total_time_s += duration_s;
  }
};

struct RendezvousModel {
  double coelliptic_offset_km = 75.0;   // phasing orbit sits this far below the target
  double phase_close_fraction = 0.75;   // fraction of the insertion gap closed by coasting
  double closing_burn_dv_kms = 0.003;
  double closing_burn_periods = 0.1;
};

// Plan a transfer from the chaser orbit onto the target orbit. Elements are
// taken at the later of the two epochs; the target keeps moving at its mean
// rate while the chaser flies each leg.
inline TransferPlan coelliptic_rendezvous_plan(const OrbitalElements& chaser,
                                               const OrbitalElements& target,
                                               const RendezvousModel& model = {}) {
  if (!(model.coelliptic_offset_km >= 0.0))
    throw std::invalid_argument("coelliptic_rendezvous_plan: negative offset");
  const double t0 = chaser.epoch_s > target.epoch_s ? chaser.epoch_s : target.epoch_s;

  TransferPlan plan;
  const double plane_deg = plane_separation_deg(chaser, target);
  const double v_node = circular_velocity(std::fmax(chaser.sma_km, target.sma_km));
  plan.add(LegKind::kPlaneChange, plane_change_dv(v_node, plane_deg), 0.0);

  constexpr double kEps = 1e-9;
  const double gap0 = phase_gap_deg(chaser, target, t0);
  const bool co_located = std::fabs(chaser.sma_km - target.sma_km) < kEps &&
                          plane_deg < kEps &&
                          std::fmin(gap0, 360.0 - gap0) < kEps;
  if (co_located) {
    plan.add(LegKind::kHohmann1, 0.0, 0.0);
    plan.add(LegKind::kPhasingCoast, 0.0, 0.0);
    plan.add(LegKind::kHohmann2, 0.0, 0.0);
  } else {
    const double a_off = target.sma_km - model.coelliptic_offset_km;
    const HohmannTransfer down = hohmann_transfer(chaser.sma_km, a_off);
    plan.add(LegKind::kHohmann1, down.total_dv(), down.duration_s);

    // Gap at offset-orbit insertion: the chaser arrives half a revolution from
    // its departure point, the target has moved on by its own mean motion.
    const double t1 = t0 + down.duration_s;
    const double chaser_lon = wrap_deg(mean_longitude_deg(chaser, t0) + 180.0);
    const double gap = wrap_deg(mean_longitude_deg(target, t1) - chaser_lon);
    double coast = 0.0;
    if (gap > kEps)
      coast = phasing_wait(a_off, target.sma_km, model.phase_close_fraction * gap);
    plan.add(LegKind::kPhasingCoast, 0.0, coast);

    const HohmannTransfer up = hohmann_transfer(a_off, target.sma_km);
    plan.add(LegKind::kHohmann2, up.total_dv(), up.duration_s);
  }

  plan.add(LegKind::kClosingBurn, model.closing_burn_dv_kms,
           model.closing_burn_periods * orbital_period(target.sma_km));
  const SafetyEllipseInjection se = safety_ellipse_injection(target.sma_km);
  plan.add(LegKind::kSafetyEllipse, se.dv_kms, se.duration_s);
  return plan;
}

}  // namespace adr::astro
