#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "adr/env.hpp"
#include "adr/env_io.hpp"

using namespace adr;
using namespace adr::env;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

MissionConfig small_config(int n = 6) {
  MissionConfig cfg;
  cfg.n_debris = n;
  return cfg;
}

bool elements_equal(const OrbitalElements& a, const OrbitalElements& b) {
  return a.sma_km == b.sma_km && a.ecc == b.ecc && a.inc_deg == b.inc_deg &&
         a.raan_deg == b.raan_deg && a.argp_deg == b.argp_deg &&
         a.anomaly_deg == b.anomaly_deg && a.epoch_s == b.epoch_s;
}

}  // namespace

TEST(Reset, NominalStartsFullAtStation) {
  const MissionState s = reset(nominal_config(), 42);
  EXPECT_DOUBLE_EQ(s.remaining_dv_kms, 3.0);
  EXPECT_DOUBLE_EQ(s.elapsed_s, 0.0);
  EXPECT_EQ(s.visited_count, 0);
  EXPECT_EQ(s.refuel_count, 0);
  EXPECT_TRUE(s.at_station);
  EXPECT_TRUE(elements_equal(s.chaser, s.config.station_orbit));
  EXPECT_DOUBLE_EQ(s.chaser.sma_km, kEarthRadiusKm + 700.0);
  EXPECT_DOUBLE_EQ(s.chaser.inc_deg, 96.0);
  ASSERT_EQ(s.debris.size(), 50u);
  for (const Debris& d : s.debris) EXPECT_FALSE(d.visited);
}

TEST(Reset, ReducedFuelConfig) {
  MissionConfig cfg = nominal_config();
  cfg.dv_max_kms = 1.0;
  EXPECT_DOUBLE_EQ(reset(cfg, 0).remaining_dv_kms, 1.0);
}

TEST(Reset, RejectsDegenerateConfigs) {
  MissionConfig cfg = nominal_config();
  cfg.dv_max_kms = 0.0;
  EXPECT_THROW(reset(cfg, 0), std::invalid_argument);
  cfg = nominal_config();
  cfg.mission_duration_s = -1.0;
  EXPECT_THROW(reset(cfg, 0), std::invalid_argument);
}

TEST(DebrisField, EmptyAndNegativeCounts) {
  EXPECT_TRUE(generate_debris_field(42, 0).empty());
  EXPECT_THROW(generate_debris_field(42, -1), std::invalid_argument);
}

TEST(DebrisField, SamplesRespectBounds) {
  const DebrisBounds bounds;
  const auto field = generate_debris_field(42, 50, bounds);
  ASSERT_EQ(field.size(), 50u);
  for (int i = 0; i < 50; ++i) {
    const Debris& d = field[static_cast<std::size_t>(i)];
    EXPECT_EQ(d.id, i);
    EXPECT_FALSE(d.visited);
    const double alt = d.elements.sma_km - kEarthRadiusKm;
    EXPECT_GE(alt, 700.0);
    EXPECT_LE(alt, 800.0);
    EXPECT_GE(d.elements.inc_deg, 94.0);
    EXPECT_LE(d.elements.inc_deg, 98.0);
    EXPECT_GE(d.elements.ecc, 0.0);
    EXPECT_LT(d.elements.ecc, 0.01);
    EXPECT_LE(angular_distance_deg(d.elements.raan_deg, bounds.raan_center_deg),
              bounds.raan_halfwidth_deg);
    EXPECT_GE(d.elements.argp_deg, 0.0);
    EXPECT_LT(d.elements.argp_deg, 360.0);
    EXPECT_GE(d.elements.anomaly_deg, 0.0);
    EXPECT_LT(d.elements.anomaly_deg, 360.0);
  }
}

TEST(DebrisField, DeterministicInSeed) {
  const auto a = generate_debris_field(42, 50);
  const auto b = generate_debris_field(42, 50);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_TRUE(elements_equal(a[i].elements, b[i].elements));
  const auto c = generate_debris_field(43, 50);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i)
    any_diff = any_diff || !elements_equal(a[i].elements, c[i].elements);
  EXPECT_TRUE(any_diff);
}

TEST(Actions, IndexRoundTrip) {
  const int n = 10;
  for (int i = 0; i < n; ++i) {
    const Action a = action_from_index(i, n);
    EXPECT_EQ(a.kind, Action::Kind::kRendezvous);
    EXPECT_EQ(a.debris_index, i);
    EXPECT_EQ(action_to_index(a, n), i);
  }
  const Action r = action_from_index(n, n);
  EXPECT_EQ(r.kind, Action::Kind::kRefuel);
  EXPECT_EQ(action_to_index(r, n), n);
  EXPECT_THROW(action_from_index(-1, n), std::invalid_argument);
  EXPECT_THROW(action_from_index(n + 1, n), std::invalid_argument);
}

TEST(ActionCost, RefuelAddsServiceLeg) {
  const MissionState s = reset(small_config(), 7);
  const TransferPlan direct =
      astro::coelliptic_rendezvous_plan(s.chaser, s.config.station_orbit, s.config.transfer_model);
  const TransferPlan refuel = action_cost(s, Action::refuel());
  ASSERT_EQ(refuel.legs.size(), direct.legs.size() + 1);
  EXPECT_EQ(refuel.legs.back().kind, astro::LegKind::kRefuelService);
  EXPECT_EQ(refuel.legs.back().dv_kms, 0.0);
  EXPECT_DOUBLE_EQ(refuel.legs.back().duration_s, s.config.refuel_service_time_s);
  EXPECT_DOUBLE_EQ(refuel.total_dv_kms, direct.total_dv_kms);
  EXPECT_DOUBLE_EQ(refuel.total_time_s, direct.total_time_s + s.config.refuel_service_time_s);
}

TEST(ActionCost, RejectsOutOfRangeIndex) {
  const MissionState s = reset(small_config(), 7);
  EXPECT_THROW(action_cost(s, Action::rendezvous(-1)), std::invalid_argument);
  EXPECT_THROW(action_cost(s, Action::rendezvous(6)), std::invalid_argument);
}

TEST(ActionCost, VisitationDoesNotChangeCost) {
  MissionState s = reset(small_config(), 7);
  const double before = action_cost(s, Action::rendezvous(2)).total_dv_kms;
  s.debris[2].visited = true;
  EXPECT_DOUBLE_EQ(action_cost(s, Action::rendezvous(2)).total_dv_kms, before);
}

TEST(Mask, FreshResetBlocksRefuel) {
  const MissionState s = reset(small_config(), 3);
  const auto mask = valid_action_mask(s);
  ASSERT_EQ(mask.size(), 7u);
  EXPECT_EQ(mask.back(), 0);
}

TEST(Mask, NoFuelBlocksEverything) {
  MissionState s = reset(small_config(), 3);
  s.remaining_dv_kms = 0.0;
  for (std::uint8_t m : valid_action_mask(s)) EXPECT_EQ(m, 0);
}

TEST(Mask, VisitedDebrisBlockedRegardlessOfBudget) {
  MissionState s = reset(small_config(), 3);
  s.debris[4].visited = true;
  EXPECT_EQ(valid_action_mask(s)[4], 0);
}

TEST(Step, RendezvousRewardsAndRelocates) {
  const MissionState s = reset(small_config(), 11);
  const auto mask = valid_action_mask(s);
  int k = -1;
  for (int i = 0; i < 6; ++i)
    if (mask[static_cast<std::size_t>(i)]) {
      k = i;
      break;
    }
  ASSERT_GE(k, 0);
  const TransferPlan plan = action_cost(s, Action::rendezvous(k));
  const StepResult res = step(s, Action::rendezvous(k));
  EXPECT_DOUBLE_EQ(res.reward, 1.0);
  EXPECT_EQ(res.state.visited_count, 1);
  EXPECT_TRUE(res.state.debris[static_cast<std::size_t>(k)].visited);
  EXPECT_TRUE(elements_equal(res.state.chaser, s.debris[static_cast<std::size_t>(k)].elements));
  EXPECT_FALSE(res.state.at_station);
  EXPECT_DOUBLE_EQ(res.dv_spent_kms, plan.total_dv_kms);
  EXPECT_DOUBLE_EQ(res.time_spent_s, plan.total_time_s);
  EXPECT_DOUBLE_EQ(res.state.remaining_dv_kms, s.remaining_dv_kms - plan.total_dv_kms);
  EXPECT_DOUBLE_EQ(res.state.elapsed_s, s.elapsed_s + plan.total_time_s);
  // the input state is untouched
  EXPECT_EQ(s.visited_count, 0);
  EXPECT_DOUBLE_EQ(s.remaining_dv_kms, 3.0);
  EXPECT_FALSE(s.debris[static_cast<std::size_t>(k)].visited);
}

TEST(Step, RefuelRestoresTankAfterChargingTransfer) {
  MissionState s = reset(small_config(), 11);
  const StepResult first = step(s, Action::rendezvous(0));
  ASSERT_FALSE(first.terminated);
  const MissionState& mid = first.state;
  ASSERT_EQ(valid_action_mask(mid).back(), 1);
  const TransferPlan plan = action_cost(mid, Action::refuel());
  const StepResult res = step(mid, Action::refuel());
  EXPECT_DOUBLE_EQ(res.reward, -0.5);
  EXPECT_EQ(res.state.refuel_count, 1);
  EXPECT_DOUBLE_EQ(res.state.remaining_dv_kms, mid.config.dv_max_kms);
  EXPECT_TRUE(res.state.at_station);
  EXPECT_TRUE(elements_equal(res.state.chaser, mid.config.station_orbit));
  EXPECT_DOUBLE_EQ(res.dv_spent_kms, plan.total_dv_kms);
  EXPECT_DOUBLE_EQ(res.state.elapsed_s, mid.elapsed_s + plan.total_time_s);
  EXPECT_EQ(res.state.visited_count, 1);
}

TEST(Step, MaskedActionThrowsAndLeavesStateIntact) {
  MissionState s = reset(small_config(), 11);
  EXPECT_THROW(step(s, Action::refuel()), std::invalid_argument);
  s.debris[1].visited = true;
  s.visited_count = 1;
  EXPECT_THROW(step(s, Action::rendezvous(1)), std::invalid_argument);
  EXPECT_THROW(step(s, Action::rendezvous(99)), std::invalid_argument);
  EXPECT_DOUBLE_EQ(s.remaining_dv_kms, 3.0);
  EXPECT_DOUBLE_EQ(s.elapsed_s, 0.0);
}

TEST(Terminal, AllVisited) {
  MissionState s = reset(small_config(2), 5);
  s.config.dv_max_kms = 100.0;
  s.remaining_dv_kms = 100.0;
  s.config.mission_duration_s = 365.0 * kSecondsPerDay;
  StepResult res = step(s, Action::rendezvous(0));
  EXPECT_FALSE(res.terminated);
  res = step(res.state, Action::rendezvous(1));
  EXPECT_TRUE(res.terminated);
  EXPECT_EQ(res.reason, TermReason::kAllVisited);
  EXPECT_EQ(res.state.visited_count, 2);
}

TEST(Terminal, TimeExhausted) {
  MissionState s = reset(small_config(), 5);
  s.elapsed_s = s.config.mission_duration_s;
  const TerminalStatus t = is_terminal(s);
  EXPECT_TRUE(t.terminal);
  EXPECT_EQ(t.reason, TermReason::kTimeExhausted);
}

TEST(Terminal, FuelExhaustedVersusNoFeasibleAction) {
  MissionState s = reset(small_config(), 5);
  s.remaining_dv_kms = 0.0;
  TerminalStatus t = is_terminal(s);
  EXPECT_TRUE(t.terminal);
  EXPECT_EQ(t.reason, TermReason::kFuelExhausted);

  // Fuel left, but every plan is more expensive than the remainder.
  s.remaining_dv_kms = 1e-3;
  t = is_terminal(s);
  EXPECT_TRUE(t.terminal);
  EXPECT_EQ(t.reason, TermReason::kNoFeasibleAction);
}

TEST(Terminal, ReasonLabels) {
  EXPECT_STREQ(term_reason_label(TermReason::kNone), "none");
  EXPECT_STREQ(term_reason_label(TermReason::kAllVisited), "all_visited");
  EXPECT_STREQ(term_reason_label(TermReason::kFuelExhausted), "fuel_exhausted");
  EXPECT_STREQ(term_reason_label(TermReason::kTimeExhausted), "time_exhausted");
  EXPECT_STREQ(term_reason_label(TermReason::kNoFeasibleAction), "no_feasible_action");
}

TEST(Observe, LayoutAndNormalization) {
  const MissionState s = reset(nominal_config(), 42);
  const auto obs = observe(s);
  ASSERT_EQ(obs.size(), observation_size(50));
  ASSERT_EQ(obs.size(), 259u);
  EXPECT_DOUBLE_EQ(obs[0], 0.0);  // chaser at the 700 km reference altitude
  EXPECT_DOUBLE_EQ(obs[6], 1.0);  // full tank
  EXPECT_DOUBLE_EQ(obs[7], 1.0);  // full clock
  EXPECT_DOUBLE_EQ(obs[8], 1.0);  // docked
  for (double v : obs) EXPECT_TRUE(std::isfinite(v));
  for (int k = 0; k < 50; ++k) {
    const std::size_t base = 9 + 5 * static_cast<std::size_t>(k);
    const Debris& d = s.debris[static_cast<std::size_t>(k)];
    EXPECT_DOUBLE_EQ(obs[base + 0], (d.elements.sma_km - s.chaser.sma_km) / 100.0);
    EXPECT_DOUBLE_EQ(obs[base + 1], (d.elements.inc_deg - s.chaser.inc_deg) / 4.0);
    EXPECT_DOUBLE_EQ(obs[base + 4], 0.0);
  }
}

TEST(Observe, VisitedFlagTracksProgress) {
  const MissionState s = reset(small_config(), 11);
  const StepResult res = step(s, Action::rendezvous(3));
  const auto obs = observe(res.state);
  int flags = 0;
  for (int k = 0; k < 6; ++k) flags += obs[9 + 5 * static_cast<std::size_t>(k) + 4] == 1.0;
  EXPECT_EQ(flags, 1);
  EXPECT_DOUBLE_EQ(obs[9 + 5 * 3 + 4], 1.0);
  EXPECT_LT(obs[6], 1.0);
  EXPECT_LT(obs[7], 1.0);
  EXPECT_DOUBLE_EQ(obs[8], 0.0);
}

TEST(Fuzz, MaskSoundnessAndBudgetsOverRandomPlay) {
  Rng rng(99);
  for (int episode = 0; episode < 300; ++episode) {
    MissionConfig cfg = small_config(6);
    if (episode % 3 == 1) cfg.dv_max_kms = 1.0;
    if (episode % 3 == 2) cfg.mission_duration_s = 2.0 * kSecondsPerDay;
    MissionState s = reset(cfg, rng.next_u64());
    double episode_return = 0.0;
    int guard = 0;
    while (!is_terminal(s).terminal && guard++ < 200) {
      const auto mask = valid_action_mask(s);
      std::vector<int> valid;
      for (int i = 0; i < static_cast<int>(mask.size()); ++i)
        if (mask[static_cast<std::size_t>(i)]) valid.push_back(i);
      ASSERT_FALSE(valid.empty());

      // every masked-out action must refuse to execute
      for (int i = 0; i < static_cast<int>(mask.size()); ++i)
        if (!mask[static_cast<std::size_t>(i)])
          EXPECT_THROW(step(s, action_from_index(i, 6)), std::invalid_argument);

      const int pick = valid[static_cast<std::size_t>(rng.uniform_int(
          static_cast<int>(valid.size())))];
      const StepResult res = step(s, action_from_index(pick, 6));
      episode_return += res.reward;
      s = res.state;
      EXPECT_GE(s.remaining_dv_kms, 0.0);
      EXPECT_LE(s.remaining_dv_kms, cfg.dv_max_kms);
      EXPECT_LE(s.elapsed_s, cfg.mission_duration_s);
      int flags = 0;
      for (const Debris& d : s.debris) flags += d.visited;
      EXPECT_EQ(flags, s.visited_count);
    }
    EXPECT_DOUBLE_EQ(episode_return, s.visited_count - 0.5 * s.refuel_count);
  }
}

TEST(Trajectory, DeterministicGivenSeedAndActions) {
  auto run = [](std::vector<double>* trace) {
    MissionState s = reset(small_config(), 2024);
    Rng rng(55);
    for (int i = 0; i < 8 && !is_terminal(s).terminal; ++i) {
      const auto mask = valid_action_mask(s);
      std::vector<int> valid;
      for (int a = 0; a < static_cast<int>(mask.size()); ++a)
        if (mask[static_cast<std::size_t>(a)]) valid.push_back(a);
      const int pick = valid[static_cast<std::size_t>(rng.uniform_int(
          static_cast<int>(valid.size())))];
      const StepResult res = step(s, action_from_index(pick, 6));
      trace->push_back(res.state.remaining_dv_kms);
      trace->push_back(res.state.elapsed_s);
      trace->push_back(res.reward);
      s = res.state;
    }
  };
  std::vector<double> t1, t2;
  run(&t1);
  run(&t2);
  EXPECT_EQ(t1, t2);
}

TEST(Clone, CopiesAreIndependent) {
  MissionState s = reset(small_config(), 13);
  MissionState clone = s;
  EXPECT_TRUE(elements_equal(clone.chaser, s.chaser));
  EXPECT_EQ(clone.debris.size(), s.debris.size());
  const StepResult res = step(clone, Action::rendezvous(0));
  clone = res.state;
  EXPECT_EQ(s.visited_count, 0);
  EXPECT_DOUBLE_EQ(s.elapsed_s, 0.0);
  EXPECT_FALSE(s.debris[0].visited);
  EXPECT_EQ(clone.visited_count, 1);

  s.elapsed_s = s.config.mission_duration_s;
  const MissionState terminal_clone = s;
  EXPECT_TRUE(is_terminal(terminal_clone).terminal);
}

TEST(Randomize, RangesAndMean) {
  Rng rng(31);
  double sum = 0.0;
  double dv_min = 1e9, dv_max = -1e9, day_min = 1e9, day_max = -1e9;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const MissionConfig cfg = randomize_mission_config(rng);
    const double days = cfg.mission_duration_s / kSecondsPerDay;
    sum += cfg.dv_max_kms;
    dv_min = std::min(dv_min, cfg.dv_max_kms);
    dv_max = std::max(dv_max, cfg.dv_max_kms);
    day_min = std::min(day_min, days);
    day_max = std::max(day_max, days);
    EXPECT_EQ(cfg.n_debris, 50);
  }
  EXPECT_GE(dv_min, 1.0);
  EXPECT_LE(dv_max, 3.5);
  EXPECT_GE(day_min, 1.0);
  EXPECT_LE(day_max, 7.0);
  EXPECT_NEAR(sum / n, 2.25, 0.01);
}

TEST(Randomize, DrawOrderIsPinned) {
  Rng a(77), b(77);
  const MissionConfig cfg = randomize_mission_config(a);
  const double dv = b.uniform(1.0, 3.5);
  const double days = b.uniform(1.0, 7.0);
  EXPECT_DOUBLE_EQ(cfg.dv_max_kms, dv);
  EXPECT_DOUBLE_EQ(cfg.mission_duration_s, days * kSecondsPerDay);
}

TEST(DebrisJson, RoundTripIsLossless) {
  const auto field = generate_debris_field(42, 20);
  const std::string path = temp_path("adr_debris_roundtrip.json");
  save_debris_json(path, field);
  const auto loaded = load_debris_json(path);
  ASSERT_EQ(loaded.size(), field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    EXPECT_EQ(loaded[i].id, field[i].id);
    EXPECT_TRUE(elements_equal(loaded[i].elements, field[i].elements));
    EXPECT_FALSE(loaded[i].visited);
  }
  std::remove(path.c_str());
}

TEST(DebrisJson, LoadValidatesElements) {
  const std::string path = temp_path("adr_debris_invalid.json");
  {
    std::ofstream out(path);
    out << R"([{"id":0,"sma_km":7078.137,"ecc":0.5,"inc_deg":96.0,)"
        << R"("raan_deg":0.0,"argp_deg":0.0,"anomaly_deg":0.0}])";
  }
  EXPECT_THROW(load_debris_json(path), std::invalid_argument);
  std::remove(path.c_str());
}

TEST(ScenarioConfig, ParsesKeyValueLines) {
  std::istringstream in(
      "# mission overrides\n"
      "dv_max_kms = 1.5\n"
      "mission_days = 3\n"
      "\n"
      "n_debris = 12\n"
      "refuel_service_time_s = 3600\n"
      "seed = 9001\n");
  const ScenarioFileConfig file = parse_scenario_config(in, "inline");
  MissionConfig cfg = nominal_config();
  file.apply(cfg);
  EXPECT_DOUBLE_EQ(cfg.dv_max_kms, 1.5);
  EXPECT_DOUBLE_EQ(cfg.mission_duration_s, 3.0 * kSecondsPerDay);
  EXPECT_EQ(cfg.n_debris, 12);
  EXPECT_DOUBLE_EQ(cfg.refuel_service_time_s, 3600.0);
  ASSERT_TRUE(file.seed.has_value());
  EXPECT_EQ(*file.seed, 9001u);
}

TEST(ScenarioConfig, PartialFilesOnlyOverrideListedKeys) {
  std::istringstream in("dv_max_kms = 2.0\n");
  const ScenarioFileConfig file = parse_scenario_config(in, "inline");
  MissionConfig cfg = nominal_config();
  file.apply(cfg);
  EXPECT_DOUBLE_EQ(cfg.dv_max_kms, 2.0);
  EXPECT_DOUBLE_EQ(cfg.mission_duration_s, 7.0 * kSecondsPerDay);
  EXPECT_EQ(cfg.n_debris, 50);
  EXPECT_FALSE(file.seed.has_value());
}

TEST(ScenarioConfig, RejectsUnknownKeysAndBadValues) {
  std::istringstream unknown("warp_factor = 9\n");
  try {
    parse_scenario_config(unknown, "inline");
    FAIL() << "expected unknown-key rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("unknown config key"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("warp_factor"), std::string::npos);
  }
  std::istringstream bad("dv_max_kms = plenty\n");
  try {
    parse_scenario_config(bad, "inline");
    FAIL() << "expected bad-value rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("bad value"), std::string::npos);
  }
}

TEST(StateJson, RoundTripPreservesTrajectory) {
  MissionState s = reset(small_config(), 321);
  s = step(s, Action::rendezvous(2)).state;
  s = step(s, Action::rendezvous(5)).state;
  const std::string path = temp_path("adr_state_roundtrip.json");
  save_state_json(path, s);
  const MissionState loaded = load_state_json(path);
  EXPECT_DOUBLE_EQ(loaded.remaining_dv_kms, s.remaining_dv_kms);
  EXPECT_DOUBLE_EQ(loaded.elapsed_s, s.elapsed_s);
  EXPECT_EQ(loaded.visited_count, 2);
  EXPECT_EQ(loaded.refuel_count, 0);
  EXPECT_EQ(loaded.at_station, s.at_station);
  EXPECT_TRUE(elements_equal(loaded.chaser, s.chaser));
  ASSERT_EQ(loaded.debris.size(), s.debris.size());
  for (std::size_t i = 0; i < s.debris.size(); ++i) {
    EXPECT_TRUE(elements_equal(loaded.debris[i].elements, s.debris[i].elements));
    EXPECT_EQ(loaded.debris[i].visited, s.debris[i].visited);
  }
  // identical masks and costs mean the episode continues identically
  EXPECT_EQ(valid_action_mask(loaded), valid_action_mask(s));
  std::remove(path.c_str());
}
