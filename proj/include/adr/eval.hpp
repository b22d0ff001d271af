#pragma once

// Scenario evaluation harness: run planners over seeded mission cases, collect
// per-case trajectories into rows, and export CSV/JSON tables plus summary and
// timing reports. Case results are deterministic up to the timing columns.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "adr/checkpoint.hpp"
#include "adr/env.hpp"
#include "adr/mcts.hpp"
#include "adr/policy.hpp"
#include "adr/text.hpp"

namespace adr::eval {

struct Scenario {
  std::string name;
  double dv_max_kms = 3.0;
  double mission_days = 7.0;
  int n_cases = 100;

  static Scenario nominal(int n_cases = 100) { return {"nominal", 3.0, 7.0, n_cases}; }
  static Scenario time_limited(int n_cases = 100) { return {"time_limited", 3.0, 3.0, n_cases}; }
  static Scenario dv_limited(int n_cases = 100) { return {"dv_limited", 1.0, 7.0, n_cases}; }
};

inline env::MissionConfig apply_scenario(const Scenario& sc, const env::MissionConfig& base) {
  env::MissionConfig cfg = base;
  cfg.dv_max_kms = sc.dv_max_kms;
  cfg.mission_duration_s = sc.mission_days * kSecondsPerDay;
  return cfg;
}

struct CaseResult {
  std::string scenario;
  std::string planner;
  std::uint64_t seed = 0;
  int debris_visited = 0;
  int refuels = 0;
  double dv_used_kms = 0.0;
  double episode_return = 0.0;
  double wall_time_s = 0.0;
  double mean_decision_latency_s = 0.0;
};

// A planner picks one action for a state. Implementations must be const and
// thread-safe; per-decision randomness derives from (case_seed, decision).
class Planner {
 public:
  virtual ~Planner() = default;
  virtual std::string name() const = 0;
  virtual env::Action select_action(const env::MissionState& state, std::uint64_t case_seed,
                                    int decision_index) const = 0;
};

class RandomPlanner : public Planner {
 public:
  std::string name() const override { return "random"; }

  env::Action select_action(const env::MissionState& state, std::uint64_t case_seed,
                            int decision_index) const override {
    const auto mask = env::valid_action_mask(state);
    std::vector<int> feasible;
    for (int i = 0; i < static_cast<int>(mask.size()); ++i)
      if (mask[static_cast<std::size_t>(i)]) feasible.push_back(i);
    if (feasible.empty()) throw std::runtime_error("random planner: no feasible action");
    Rng rng(derive_seed(case_seed, 0xA0000 + static_cast<std::uint64_t>(decision_index)));
    const int pick = rng.uniform_int(static_cast<int>(feasible.size()));
    return env::action_from_index(feasible[static_cast<std::size_t>(pick)],
                                  static_cast<int>(state.debris.size()));
  }
};

class MctsPlanner : public Planner {
 public:
  explicit MctsPlanner(mcts::MctsConfig config = {}) : config_(config) {}

  std::string name() const override { return "mcts"; }

  env::Action select_action(const env::MissionState& state, std::uint64_t case_seed,
                            int decision_index) const override {
    mcts::MctsConfig cfg = config_;
    cfg.seed = derive_seed(case_seed, 0xB0000 + static_cast<std::uint64_t>(decision_index));
    return mcts::plan(state, cfg);
  }

 private:
  mcts::MctsConfig config_;
};

class PpoPlanner : public Planner {
 public:
  PpoPlanner(std::string tag, policy::MlpParams params, bool deterministic = true)
      : tag_(std::move(tag)), params_(std::move(params)), deterministic_(deterministic) {}

  std::string name() const override { return tag_; }

  env::Action select_action(const env::MissionState& state, std::uint64_t case_seed,
                            int decision_index) const override {
    const std::vector<double> obs_raw = env::observe(state);
    if (static_cast<Eigen::Index>(obs_raw.size()) != params_.w1.cols())
      throw std::runtime_error("ppo planner: checkpoint does not match the observation size");
    const policy::VectorXd obs = Eigen::Map<const policy::VectorXd>(
        obs_raw.data(), static_cast<Eigen::Index>(obs_raw.size()));
    Rng rng(derive_seed(case_seed, 0xC0000 + static_cast<std::uint64_t>(decision_index)));
    const int idx = policy::act(params_, obs, env::valid_action_mask(state), deterministic_, rng);
    return env::action_from_index(idx, static_cast<int>(state.debris.size()));
  }

 private:
  std::string tag_;
  policy::MlpParams params_;
  bool deterministic_;
};

inline CaseResult run_case(const Planner& planner, const Scenario& scenario,
                           const env::MissionConfig& base, std::uint64_t seed) {
  const env::MissionConfig cfg = apply_scenario(scenario, base);
  env::MissionState state = env::reset(cfg, seed);

  CaseResult res;
  res.scenario = scenario.name;
  res.planner = planner.name();
  res.seed = seed;

  const auto t_case = std::chrono::steady_clock::now();
  double latency_sum = 0.0;
  int decisions = 0;
  while (!env::is_terminal(state).terminal) {
    const auto t0 = std::chrono::steady_clock::now();
    const env::Action action = planner.select_action(state, seed, decisions);
    latency_sum += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ++decisions;
    env::StepResult sr = env::step(state, action);
    res.episode_return += sr.reward;
    res.dv_used_kms += sr.dv_spent_kms;
    state = std::move(sr.state);
  }
  res.debris_visited = state.visited_count;
  res.refuels = state.refuel_count;
  res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_case).count();
  res.mean_decision_latency_s = decisions > 0 ? latency_sum / decisions : 0.0;
  return res;
}

// Case i runs with seed base_seed + i. With jobs > 1 the cases are distributed
// over worker threads; each result lands in its own slot, so the result set is
// identical to a sequential run.
inline std::vector<CaseResult> run_scenario(const Planner& planner, const Scenario& scenario,
                                            const env::MissionConfig& base,
                                            std::uint64_t base_seed, int jobs = 1) {
  const int n = scenario.n_cases;
  std::vector<CaseResult> results(static_cast<std::size_t>(n));
  if (n == 0) return results;
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i)
      results[static_cast<std::size_t>(i)] =
          run_case(planner, scenario, base, base_seed + static_cast<std::uint64_t>(i));
    return results;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += jobs)
          results[static_cast<std::size_t>(i)] =
              run_case(planner, scenario, base, base_seed + static_cast<std::uint64_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

struct SummaryRow {
  std::string scenario;
  std::string planner;
  int n_cases = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std_dev = 0.0;  // population
};

inline SummaryRow summarize(const std::vector<CaseResult>& results) {
  if (results.empty()) throw std::invalid_argument("summarize: empty result set");
  SummaryRow row;
  row.scenario = results.front().scenario;
  row.planner = results.front().planner;
  row.n_cases = static_cast<int>(results.size());
  double sum = 0.0;
  row.min = row.max = static_cast<double>(results.front().debris_visited);
  for (const CaseResult& r : results) {
    const double v = static_cast<double>(r.debris_visited);
    sum += v;
    row.min = std::min(row.min, v);
    row.max = std::max(row.max, v);
  }
  row.mean = sum / row.n_cases;
  double var = 0.0;
  for (const CaseResult& r : results) {
    const double d = static_cast<double>(r.debris_visited) - row.mean;
    var += d * d;
  }
  row.std_dev = std::sqrt(var / row.n_cases);
  return row;
}

inline std::vector<SummaryRow> summarize_groups(const std::vector<CaseResult>& results) {
  std::map<std::pair<std::string, std::string>, std::vector<CaseResult>> groups;
  for (const CaseResult& r : results) groups[{r.scenario, r.planner}].push_back(r);
  std::vector<SummaryRow> rows;
  rows.reserve(groups.size());
  for (const auto& [key, group] : groups) rows.push_back(summarize(group));
  return rows;
}

struct TimingRow {
  std::string scenario;
  std::string planner;
  double mean_wall_time_s = 0.0;
  double max_wall_time_s = 0.0;
  double mean_decision_latency_s = 0.0;
};

inline std::vector<TimingRow> timing_report(const std::vector<CaseResult>& results) {
  std::map<std::pair<std::string, std::string>, std::vector<const CaseResult*>> groups;
  for (const CaseResult& r : results) groups[{r.scenario, r.planner}].push_back(&r);
  std::vector<TimingRow> rows;
  for (const auto& [key, group] : groups) {
    TimingRow row;
    row.scenario = key.first;
    row.planner = key.second;
    double lat = 0.0;
    for (const CaseResult* r : group) {
      row.mean_wall_time_s += r->wall_time_s;
      row.max_wall_time_s = std::max(row.max_wall_time_s, r->wall_time_s);
      lat += r->mean_decision_latency_s;
    }
    row.mean_wall_time_s /= static_cast<double>(group.size());
    row.mean_decision_latency_s = lat / static_cast<double>(group.size());
    rows.push_back(row);
  }
  return rows;
}

// Histogram of debris_visited per (scenario, planner): value -> case count.
inline std::map<std::pair<std::string, std::string>, std::map<int, int>> visit_histograms(
    const std::vector<CaseResult>& results) {
  std::map<std::pair<std::string, std::string>, std::map<int, int>> hist;
  for (const CaseResult& r : results) hist[{r.scenario, r.planner}][r.debris_visited] += 1;
  return hist;
}

inline const char* kResultsCsvHeader =
    "scenario,planner,seed,debris_visited,refuels,dv_used_kms,episode_return,"
    "wall_time_s,mean_decision_latency_s";

inline void export_results_csv(const std::vector<CaseResult>& results, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << kResultsCsvHeader << "\n";
  for (const CaseResult& r : results) {
    out << r.scenario << ',' << r.planner << ',' << r.seed << ',' << r.debris_visited << ','
        << r.refuels << ',' << format_double(r.dv_used_kms) << ','
        << format_double(r.episode_return) << ',' << format_double(r.wall_time_s) << ','
        << format_double(r.mean_decision_latency_s) << "\n";
  }
}

inline nlohmann::json case_result_to_json(const CaseResult& r) {
  return nlohmann::json{{"scenario", r.scenario},
                        {"planner", r.planner},
                        {"seed", r.seed},
                        {"debris_visited", r.debris_visited},
                        {"refuels", r.refuels},
                        {"dv_used_kms", r.dv_used_kms},
                        {"episode_return", r.episode_return},
                        {"wall_time_s", r.wall_time_s},
                        {"mean_decision_latency_s", r.mean_decision_latency_s}};
}

inline void export_results_json(const std::vector<CaseResult>& results, const std::string& path) {
  nlohmann::json doc;
  doc["results"] = nlohmann::json::array();
  for (const CaseResult& r : results) doc["results"].push_back(case_result_to_json(r));
  doc["summary"] = nlohmann::json::array();
  for (const SummaryRow& s : summarize_groups(results)) {
    doc["summary"].push_back({{"scenario", s.scenario},
                              {"planner", s.planner},
                              {"n_cases", s.n_cases},
                              {"min", s.min},
                              {"max", s.max},
                              {"mean", s.mean},
                              {"std", s.std_dev}});
  }
  doc["histograms"] = nlohmann::json::array();
  for (const auto& [key, counts] : visit_histograms(results)) {
    nlohmann::json h{{"scenario", key.first}, {"planner", key.second}};
    h["counts"] = nlohmann::json::object();
    for (const auto& [visits, count] : counts) h["counts"][std::to_string(visits)] = count;
    doc["histograms"].push_back(std::move(h));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << "\n";
}

inline void export_timing_text(const std::vector<CaseResult>& results, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "scenario,planner,mean_wall_time_s,max_wall_time_s,mean_decision_latency_s\n";
  for (const TimingRow& r : timing_report(results)) {
    out << r.scenario << ',' << r.planner << ',' << format_double(r.mean_wall_time_s) << ','
        << format_double(r.max_wall_time_s) << ',' << format_double(r.mean_decision_latency_s)
        << "\n";
  }
}

inline std::string summary_table(const std::vector<CaseResult>& results) {
  std::string out = "scenario          planner          cases  min  max   mean   std\n";
  char buf[160];
  for (const SummaryRow& s : summarize_groups(results)) {
    std::snprintf(buf, sizeof buf, "%-17s %-16s %5d %4.0f %4.0f %6.1f %5.1f\n",
                  s.scenario.c_str(), s.planner.c_str(), s.n_cases, s.min, s.max, s.mean,
                  s.std_dev);
    out += buf;
  }
  return out;
}

}  // namespace adr::eval
