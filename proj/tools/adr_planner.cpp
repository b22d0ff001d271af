// Command-line front end: debris-field generation, PPO training, scenario
// evaluation, and single-mission plan traces. Every invocation takes one seed;
// internal streams derive from it (see rng.hpp). Config precedence is
// flags > config file (--config or $ADR_PLANNER_CONFIG) > built-in presets.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adr/checkpoint.hpp"
#include "adr/env.hpp"
#include "adr/env_io.hpp"
#include "adr/eval.hpp"
#include "adr/manifest.hpp"
#include "adr/mcts.hpp"
#include "adr/ppo.hpp"
#include "adr/text.hpp"

namespace fs = std::filesystem;
using namespace adr;

namespace {

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int n_debris = -1;
  double dv_max = -1.0;
  double mission_days = -1.0;
  double refuel_time = -1.0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path,
                  "scenario config file (default: $ADR_PLANNER_CONFIG if set)");
  cmd->add_option("--seed", o.seed, "base seed for this command")->each([&](const std::string&) {
    o.seed_set = true;
  });
  cmd->add_option("--n-debris", o.n_debris, "debris count override");
  cmd->add_option("--dv-max", o.dv_max, "fuel budget override, km/s");
  cmd->add_option("--mission-days", o.mission_days, "mission duration override, days");
  cmd->add_option("--refuel-time", o.refuel_time, "refuel service time override, s");
}

// Resolve a mission config: preset defaults, then file keys, then flags.
env::MissionConfig resolve_config(const CommonOpts& o, std::uint64_t& seed,
                                  env::MissionConfig base) {
  std::string path = o.config_path;
  if (path.empty()) {
    if (const char* envp = std::getenv("ADR_PLANNER_CONFIG")) path = envp;
  }
  if (!path.empty()) {
    const env::ScenarioFileConfig file = env::load_scenario_config(path);
    file.apply(base);
    if (file.seed) seed = *file.seed;
  }
  if (o.seed_set) seed = o.seed;
  if (o.n_debris >= 0) base.n_debris = o.n_debris;
  if (o.dv_max > 0.0) base.dv_max_kms = o.dv_max;
  if (o.mission_days > 0.0) base.mission_duration_s = o.mission_days * kSecondsPerDay;
  if (o.refuel_time >= 0.0) base.refuel_service_time_s = o.refuel_time;
  return base;
}

nlohmann::json config_snapshot(const env::MissionConfig& cfg) {
  return nlohmann::json{{"dv_max_kms", cfg.dv_max_kms},
                        {"mission_days", cfg.mission_duration_s / kSecondsPerDay},
                        {"n_debris", cfg.n_debris},
                        {"refuel_service_time_s", cfg.refuel_service_time_s},
                        {"coelliptic_offset_km", cfg.transfer_model.coelliptic_offset_km},
                        {"phase_close_fraction", cfg.transfer_model.phase_close_fraction}};
}

std::vector<std::string> collect_argv(int argc, char** argv) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(argc));
  for (int i = 0; i < argc; ++i) out.emplace_back(argv[i]);
  return out;
}

int cmd_gen_debris(const CommonOpts& opts, int n, const std::string& out_path,
                   const std::vector<std::string>& argv) {
  cli::RunManifest manifest;
  manifest.command = "gen-debris";
  manifest.argv = argv;
  manifest.started_at = iso8601_utc_now();
  std::uint64_t seed = 0;
  env::MissionConfig cfg = resolve_config(opts, seed, env::nominal_config());
  if (n >= 0) cfg.n_debris = n;

  env::DebrisBounds bounds;
  bounds.raan_center_deg = cfg.station_orbit.raan_deg;
  const auto field = env::generate_debris_field(seed, cfg.n_debris, bounds);
  env::save_debris_json(out_path, field);

  manifest.seed = seed;
  manifest.config = config_snapshot(cfg);
  manifest.outputs = {out_path};
  manifest.finished_at = iso8601_utc_now();
  cli::write_manifest(manifest, out_path + ".manifest.json");
  std::printf("wrote %d debris to %s\n", cfg.n_debris, out_path.c_str());
  return 0;
}

int cmd_train(const CommonOpts& opts, const std::string& mode, const std::string& preset,
              long steps, const std::string& out_path, std::string log_path, double lr,
              int hidden, int batch, const std::vector<std::string>& argv) {
  cli::RunManifest manifest;
  manifest.command = "train";
  manifest.argv = argv;
  manifest.started_at = iso8601_utc_now();

  std::uint64_t seed = 0;
  env::MissionConfig base = resolve_config(opts, seed, env::desk_config());

  policy::PpoConfig cfg;
  if (preset == "desk") cfg = policy::PpoConfig::desk();
  else if (preset == "full") cfg = policy::PpoConfig::full_nominal();
  else if (preset == "full-low-lr") cfg = policy::PpoConfig::full_low_lr();
  else throw std::runtime_error("unknown preset: " + preset);
  if (steps >= 0) cfg.total_timesteps = steps;
  if (lr > 0.0) cfg.learning_rate = lr;
  if (hidden > 0) cfg.hidden_width = hidden;
  if (batch > 0) cfg.batch_size = batch;
  cfg.seed = seed;

  if (mode != "nominal" && mode != "randomized")
    throw std::runtime_error("unknown train mode: " + mode);
  cfg.domain_randomized = (mode == "randomized");

  policy::EnvFactory factory{base, cfg.domain_randomized};
  auto [params, report] = policy::train(factory, cfg);

  policy::save_checkpoint(out_path, params, cfg);
  if (log_path.empty()) log_path = out_path + ".log.csv";
  report.write_csv(log_path);

  manifest.seed = seed;
  manifest.config = config_snapshot(base);
  manifest.config["mode"] = mode;
  manifest.config["preset"] = preset;
  manifest.config["ppo"] = policy::ppo_config_to_json(cfg);
  if (cfg.domain_randomized) {
    manifest.config["randomization"] = {{"dv_max_kms_range", {1.0, 3.5}},
                                        {"mission_days_range", {1.0, 7.0}}};
  }
  manifest.outputs = {out_path, log_path};
  manifest.finished_at = iso8601_utc_now();
  cli::write_manifest(manifest, out_path + ".manifest.json");

  const double final_return = report.rows.empty() ? 0.0 : report.rows.back().mean_return;
  std::printf("trained %s policy for %ld steps (%zu updates), final mean return %.3f\n",
              mode.c_str(), cfg.total_timesteps, report.rows.size(), final_return);
  std::printf("checkpoint: %s\nlog: %s\n", out_path.c_str(), log_path.c_str());
  return 0;
}

std::unique_ptr<eval::Planner> make_planner(const std::string& kind, const mcts::MctsConfig& mc) {
  if (kind == "random") return std::make_unique<eval::RandomPlanner>();
  if (kind == "mcts") return std::make_unique<eval::MctsPlanner>(mc);
  if (kind.rfind("ppo:", 0) == 0) {
    const std::string path = kind.substr(4);
    const policy::Checkpoint ck = policy::load_checkpoint(path);
    const std::string tag = "ppo:" + fs::path(path).stem().string();
    return std::make_unique<eval::PpoPlanner>(tag, ck.params);
  }
  throw std::runtime_error("unknown planner: " + kind + " (expected random, mcts, or ppo:PATH)");
}

std::vector<eval::Scenario> make_scenarios(const std::string& name, int cases) {
  if (name == "nominal") return {eval::Scenario::nominal(cases)};
  if (name == "time_limited" || name == "time") return {eval::Scenario::time_limited(cases)};
  if (name == "dv_limited" || name == "dv") return {eval::Scenario::dv_limited(cases)};
  if (name == "all")
    return {eval::Scenario::nominal(cases), eval::Scenario::time_limited(cases),
            eval::Scenario::dv_limited(cases)};
  throw std::runtime_error("unknown scenario: " + name);
}

// Scenario seed ranges stay disjoint: block i covers base + i*1000000.
std::uint64_t scenario_seed_base(std::uint64_t base_seed, const std::string& scenario) {
  if (scenario == "nominal") return base_seed;
  if (scenario == "time_limited") return base_seed + 1000000;
  return base_seed + 2000000;
}

int cmd_evaluate(const CommonOpts& opts, const std::string& planner_kind,
                 const std::string& scenario_name, int cases, const std::string& out_dir,
                 int jobs, const mcts::MctsConfig& mc, const std::vector<std::string>& argv) {
  cli::RunManifest manifest;
  manifest.command = "evaluate";
  manifest.argv = argv;
  manifest.started_at = iso8601_utc_now();

  std::uint64_t seed = 0;
  const env::MissionConfig base = resolve_config(opts, seed, env::nominal_config());
  const auto planner = make_planner(planner_kind, mc);
  const auto scenarios = make_scenarios(scenario_name, cases);

  fs::create_directories(out_dir);
  std::vector<eval::CaseResult> results;
  for (const eval::Scenario& sc : scenarios) {
    auto rows = eval::run_scenario(*planner, sc, base, scenario_seed_base(seed, sc.name), jobs);
    results.insert(results.end(), rows.begin(), rows.end());
  }

  const std::string csv_path = (fs::path(out_dir) / "results.csv").string();
  const std::string json_path = (fs::path(out_dir) / "results.json").string();
  const std::string timing_path = (fs::path(out_dir) / "timing.csv").string();
  const std::string summary_path = (fs::path(out_dir) / "summary.txt").string();
  eval::export_results_csv(results, csv_path);
  eval::export_results_json(results, json_path);
  eval::export_timing_text(results, timing_path);
  {
    std::ofstream out(summary_path);
    out << eval::summary_table(results);
  }

  manifest.seed = seed;
  manifest.config = config_snapshot(base);
  manifest.config["planner"] = planner->name();
  manifest.config["scenario"] = scenario_name;
  manifest.config["cases"] = cases;
  manifest.config["jobs"] = jobs;
  manifest.outputs = {csv_path, json_path, timing_path, summary_path};
  manifest.finished_at = iso8601_utc_now();
  cli::write_manifest(manifest, (fs::path(out_dir) / "manifest.json").string());

  std::cout << eval::summary_table(results);
  std::printf("results in %s\n", out_dir.c_str());
  return 0;
}

int cmd_plan(const CommonOpts& opts, const std::string& planner_kind,
             const std::string& scenario_name, const std::string& state_path, int horizon,
             const mcts::MctsConfig& mc, const std::string& manifest_path,
             const std::vector<std::string>& argv) {
  std::uint64_t seed = 0;
  env::MissionState state;
  if (!state_path.empty()) {
    state = env::load_state_json(state_path);
  } else {
    env::MissionConfig defaults = env::nominal_config();
    if (scenario_name != "none") {
      const auto scenarios = make_scenarios(scenario_name, 1);
      defaults = eval::apply_scenario(scenarios.front(), defaults);
    }
    // Scenario picks the preset budgets; config file and explicit flags still win.
    const env::MissionConfig base = resolve_config(opts, seed, defaults);
    state = env::reset(base, seed);
  }
  const auto planner = make_planner(planner_kind, mc);

  double cumulative = 0.0;
  int decision = 0;
  env::TerminalStatus term = env::is_terminal(state);
  while (!term.terminal && decision < horizon) {
    const env::Action action = planner->select_action(state, seed, decision);
    const env::TransferPlan plan = env::action_cost(state, action);
    env::StepResult res = env::step(state, action);
    cumulative += res.reward;
    ++decision;

    const int n = static_cast<int>(state.debris.size());
    if (action.kind == env::Action::Kind::kRefuel)
      std::printf("decision %d: refuel (action %d)\n", decision, env::action_to_index(action, n));
    else
      std::printf("decision %d: rendezvous debris %d\n", decision, action.debris_index);
    for (const astro::TransferLeg& leg : plan.legs)
      std::printf("    %-14s dv %9.5f km/s   t %12.1f s\n", astro::leg_label(leg.kind),
                  leg.dv_kms, leg.duration_s);
    std::printf("    total          dv %9.5f km/s   t %12.1f s   reward %+.1f   return %+.1f\n",
                res.dv_spent_kms, res.time_spent_s, res.reward, cumulative);
    std::printf("    remaining dv %.5f km/s, elapsed %.1f / %.1f days\n",
                res.state.remaining_dv_kms, res.state.elapsed_s / kSecondsPerDay,
                res.state.config.mission_duration_s / kSecondsPerDay);
    term = {res.terminated, res.reason};
    state = std::move(res.state);
  }
  std::printf("episode over after %d decisions: %s\n", decision,
              term.terminal ? env::term_reason_label(term.reason) : "horizon reached");
  std::printf("visited %d debris, %d refuels, return %+.1f\n", state.visited_count,
              state.refuel_count, cumulative);

  if (!manifest_path.empty()) {
    cli::RunManifest manifest;
    manifest.command = "plan";
    manifest.argv = argv;
    manifest.seed = seed;
    manifest.config = config_snapshot(state.config);
    manifest.config["planner"] = planner->name();
    manifest.started_at = manifest.finished_at = iso8601_utc_now();
    cli::write_manifest(manifest, manifest_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constrained multi-debris rendezvous planning and evaluation"};
  app.set_version_flag("--version", std::string(ADR_PLANNER_VERSION));
  app.require_subcommand(1);
  const std::vector<std::string> argv_copy = collect_argv(argc, argv);

  // gen-debris
  CommonOpts gen_opts;
  int gen_n = -1;
  std::string gen_out = "debris.json";
  CLI::App* gen = app.add_subcommand("gen-debris", "generate a seeded debris field file");
  add_common(gen, gen_opts);
  gen->add_option("--n", gen_n, "number of debris objects");
  gen->add_option("--out", gen_out, "output JSON path");

  // train
  CommonOpts train_opts;
  std::string train_mode = "nominal", train_preset = "desk", train_out = "checkpoint.json",
              train_log;
  long train_steps = -1;
  double train_lr = -1.0;
  int train_hidden = -1, train_batch = -1;
  CLI::App* train = app.add_subcommand("train", "train a masked PPO policy");
  add_common(train, train_opts);
  train->add_option("--mode", train_mode, "nominal or randomized");
  train->add_option("--preset", train_preset, "desk, full, or full-low-lr");
  train->add_option("--steps", train_steps, "total environment steps");
  train->add_option("--out", train_out, "checkpoint output path");
  train->add_option("--log", train_log, "training log CSV path");
  train->add_option("--lr", train_lr, "learning rate override");
  train->add_option("--hidden", train_hidden, "hidden width override");
  train->add_option("--batch", train_batch, "rollout batch size override");

  // evaluate
  CommonOpts eval_opts;
  std::string eval_planner = "random", eval_scenario = "all", eval_out = "eval_out";
  int eval_cases = 100, eval_jobs = 1;
  mcts::MctsConfig eval_mcts;
  CLI::App* evaluate = app.add_subcommand("evaluate", "run a planner over scenario cases");
  add_common(evaluate, eval_opts);
  evaluate->add_option("--planner", eval_planner, "random, mcts, or ppo:PATH");
  evaluate->add_option("--scenario", eval_scenario, "nominal, time_limited, dv_limited, or all");
  evaluate->add_option("--cases", eval_cases, "cases per scenario");
  evaluate->add_option("--out-dir", eval_out, "output directory");
  evaluate->add_option("--jobs", eval_jobs, "worker threads");
  evaluate->add_option("--mcts-sims", eval_mcts.simulations_per_step, "MCTS simulations per step");
  evaluate->add_option("--mcts-c", eval_mcts.c_uct, "MCTS exploration constant");
  evaluate->add_option("--mcts-depth", eval_mcts.rollout_depth, "MCTS rollout depth");

  // plan
  CommonOpts plan_opts;
  std::string plan_planner = "mcts", plan_scenario = "nominal", plan_state, plan_manifest;
  int plan_horizon = 1000;
  mcts::MctsConfig plan_mcts;
  CLI::App* plan = app.add_subcommand("plan", "print one mission's decision trace");
  add_common(plan, plan_opts);
  plan->add_option("--planner", plan_planner, "random, mcts, or ppo:PATH");
  plan->add_option("--scenario", plan_scenario, "nominal, time_limited, dv_limited, or none");
  plan->add_option("--state", plan_state, "resume from a mission state JSON file");
  plan->add_option("--horizon", plan_horizon, "maximum decisions to take");
  plan->add_option("--manifest", plan_manifest, "optional manifest output path");
  plan->add_option("--mcts-sims", plan_mcts.simulations_per_step, "MCTS simulations per step");
  plan->add_option("--mcts-c", plan_mcts.c_uct, "MCTS exploration constant");
  plan->add_option("--mcts-depth", plan_mcts.rollout_depth, "MCTS rollout depth");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_debris(gen_opts, gen_n, gen_out, argv_copy);
    if (train->parsed())
      return cmd_train(train_opts, train_mode, train_preset, train_steps, train_out, train_log,
                       train_lr, train_hidden, train_batch, argv_copy);
    if (evaluate->parsed())
      return cmd_evaluate(eval_opts, eval_planner, eval_scenario, eval_cases, eval_out, eval_jobs,
                          eval_mcts, argv_copy);
    if (plan->parsed())
      return cmd_plan(plan_opts, plan_planner, plan_scenario, plan_state, plan_horizon, plan_mcts,
                      plan_manifest, argv_copy);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
