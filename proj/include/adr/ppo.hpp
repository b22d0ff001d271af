#pragma once

// Clipped-surrogate PPO with generalized advantage estimation, trained with
// Adam over minibatches of on-policy rollouts. The loss and its hand-derived
// gradients live in one function so finite-difference checks exercise exactly
// the math the optimizer uses.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "adr/env.hpp"
#include "adr/policy.hpp"
#include "adr/text.hpp"

namespace adr::policy {

struct PpoConfig {
  double learning_rate = 3e-5;
  double clip_epsilon = 0.2;
  double discount = 0.99;
  double gae_lambda = 0.95;
  int batch_size = 2048;
  int minibatch_size = 256;
  int epochs_per_update = 10;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  int hidden_width = 256;
  long total_timesteps = 1000000;
  bool domain_randomized = false;
  std::uint64_t seed = 0;

  // Full-scale settings: wide network, million-step run, hours of training.
  static PpoConfig full_nominal() { return {}; }

  // Full-scale variant with the very small learning rate.
  static PpoConfig full_low_lr() {
    PpoConfig c;
    c.learning_rate = 5e-6;
    return c;
  }

  // Small network and fast learning rate sized for minutes-long runs.
  static PpoConfig desk() {
    PpoConfig c;
    c.learning_rate = 3e-4;
    c.hidden_width = 64;
    c.batch_size = 1024;
    c.total_timesteps = 50000;
    return c;
  }
};

struct RolloutBuffer {
  std::vector<VectorXd> obs;
  std::vector<std::vector<std::uint8_t>> masks;
  std::vector<int> actions;
  std::vector<double> log_probs;
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<std::uint8_t> dones;
  std::vector<double> advantages;
  std::vector<double> returns;

  std::size_t size() const { return actions.size(); }

  void clear() {
    obs.clear(); masks.clear(); actions.clear(); log_probs.clear();
    rewards.clear(); values.clear(); dones.clear();
    advantages.clear(); returns.clear();
  }

  void push(VectorXd o, std::vector<std::uint8_t> mask, int action, double log_prob,
            double reward, double value, bool done) {
    obs.push_back(std::move(o));
    masks.push_back(std::move(mask));
    actions.push_back(action);
    log_probs.push_back(log_prob);
    rewards.push_back(reward);
    values.push_back(value);
    dones.push_back(done ? 1 : 0);
  }
};

// delta_t = r_t + gamma v_{t+1} (1 - done_t) - v_t, accumulated backwards with
// gamma*lambda; returns are advantages + values.
inline std::pair<std::vector<double>, std::vector<double>> compute_gae(
    const std::vector<double>& rewards, const std::vector<double>& values,
    const std::vector<std::uint8_t>& dones, double gamma, double lambda,
    double bootstrap_value) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n)
    throw std::invalid_argument("compute_gae: length mismatch");
  std::vector<double> adv(n, 0.0), ret(n, 0.0);
  double running = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double not_done = dones[i] ? 0.0 : 1.0;
    const double next_value = (i + 1 < n) ? values[i + 1] : bootstrap_value;
    const double delta = rewards[i] + gamma * next_value * not_done - values[i];
    running = delta + gamma * lambda * not_done * running;
    adv[i] = running;
    ret[i] = adv[i] + values[i];
  }
  return {std::move(adv), std::move(ret)};
}

inline double clipped_surrogate_loss(double ratio, double advantage, double clip_epsilon) {
  const double clipped = std::clamp(ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon);
  return -std::min(ratio * advantage, clipped * advantage);
}

struct LossStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double total = 0.0;
};

// Mean PPO loss over `indices`, with optional analytic gradients accumulated
// into `grads` (same shapes as `params`, pre-zeroed here). Advantages and
// returns must already be filled in.
inline LossStats ppo_loss(const MlpParams& params, const RolloutBuffer& buffer,
                          const std::vector<std::size_t>& indices, const PpoConfig& cfg,
                          MlpParams* grads) {
  if (indices.empty()) throw std::invalid_argument("ppo_loss: empty index set");
  if (grads) grads->for_each([](auto& m) { m.setZero(); });
  LossStats stats;
  const double inv_n = 1.0 / static_cast<double>(indices.size());

  for (const std::size_t idx : indices) {
    ForwardTrace trace;
    const ForwardResult fwd = forward(params, buffer.obs[idx], &trace);
    const VectorXd logp = masked_log_softmax(fwd.logits, buffer.masks[idx]);
    const int a = buffer.actions[idx];
    const double adv = buffer.advantages[idx];

    const double ratio = std::exp(logp(a) - buffer.log_probs[idx]);
    const double surr_raw = ratio * adv;
    const double clipped = std::clamp(ratio, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon);
    const double surr_clip = clipped * adv;
    const double policy_loss = -std::min(surr_raw, surr_clip);

    const double verr = fwd.value - buffer.returns[idx];
    const double value_loss = verr * verr;

    double entropy = 0.0;
    for (Eigen::Index j = 0; j < logp.size(); ++j) {
      if (!buffer.masks[idx][static_cast<std::size_t>(j)]) continue;
      const double pj = std::exp(logp(j));
      if (pj > 0.0) entropy -= pj * logp(j);
    }

    stats.policy_loss += policy_loss * inv_n;
    stats.value_loss += value_loss * inv_n;
    stats.entropy += entropy * inv_n;

    if (!grads) continue;

    // d(policy_loss)/d(ratio) is -adv on the unclipped branch, 0 once clipping
    // is active; masked logits receive no gradient anywhere below.
    const double dl_dratio = (surr_raw <= surr_clip) ? -adv : 0.0;
    const double dl_dlogpa = dl_dratio * ratio;

    VectorXd g_logits = VectorXd::Zero(logp.size());
    for (Eigen::Index j = 0; j < logp.size(); ++j) {
      if (!buffer.masks[idx][static_cast<std::size_t>(j)]) continue;
      const double pj = std::exp(logp(j));
      const double indicator = (static_cast<int>(j) == a) ? 1.0 : 0.0;
      double g = dl_dlogpa * (indicator - pj);
      g += cfg.entropy_coef * pj * (logp(j) + entropy);
      g_logits(j) = g;
    }

    const double dl_dv = 2.0 * cfg.value_coef * verr;

    const VectorXd g_a2 = params.w_pi.transpose() * g_logits + params.w_v.transpose() * dl_dv;
    const VectorXd g_z2 =
        g_a2.array() * (1.0 - trace.a2.array() * trace.a2.array());
    const VectorXd g_a1 = params.w2.transpose() * g_z2;
    const VectorXd g_z1 =
        g_a1.array() * (1.0 - trace.a1.array() * trace.a1.array());

    grads->w_pi.noalias() += inv_n * g_logits * trace.a2.transpose();
    grads->b_pi.noalias() += inv_n * g_logits;
    grads->w_v.noalias() += inv_n * dl_dv * trace.a2.transpose();
    grads->b_v(0) += inv_n * dl_dv;
    grads->w2.noalias() += inv_n * g_z2 * trace.a1.transpose();
    grads->b2.noalias() += inv_n * g_z2;
    grads->w1.noalias() += inv_n * g_z1 * buffer.obs[idx].transpose();
    grads->b1.noalias() += inv_n * g_z1;
  }

  stats.total = stats.policy_loss + cfg.value_coef * stats.value_loss -
                cfg.entropy_coef * stats.entropy;
  if (!std::isfinite(stats.total)) throw std::runtime_error("ppo_loss: non-finite loss");
  return stats;
}

struct AdamState {
  MlpParams m, v;
  long t = 0;

  static AdamState like(const MlpParams& params) {
    return {MlpParams::zeros_like(params), MlpParams::zeros_like(params), 0};
  }
};

inline void adam_step(MlpParams& params, const MlpParams& grads, AdamState& state, double lr,
                      double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8) {
  state.t += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
  auto update_one = [&](auto& p, const auto& g, auto& m, auto& v) {
    m = beta1 * m + (1.0 - beta1) * g;
    v.array() = beta2 * v.array() + (1.0 - beta2) * g.array().square();
    p.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
  };
  update_one(params.w1, grads.w1, state.m.w1, state.v.w1);
  update_one(params.b1, grads.b1, state.m.b1, state.v.b1);
  update_one(params.w2, grads.w2, state.m.w2, state.v.w2);
  update_one(params.b2, grads.b2, state.m.b2, state.v.b2);
  update_one(params.w_pi, grads.w_pi, state.m.w_pi, state.v.w_pi);
  update_one(params.b_pi, grads.b_pi, state.m.b_pi, state.v.b_pi);
  update_one(params.w_v, grads.w_v, state.m.w_v, state.v.w_v);
  update_one(params.b_v, grads.b_v, state.m.b_v, state.v.b_v);
}

// Normalize advantages to zero mean and unit population variance in place.
inline void normalize_advantages(RolloutBuffer& buffer) {
  const std::size_t n = buffer.advantages.size();
  if (n == 0) return;
  double mean = 0.0;
  for (double a : buffer.advantages) mean += a;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double a : buffer.advantages) var += (a - mean) * (a - mean);
  var /= static_cast<double>(n);
  const double denom = std::sqrt(var) + 1e-8;
  for (double& a : buffer.advantages) a = (a - mean) / denom;
}

// One PPO update: normalize advantages, then epochs_per_update shuffled passes
// of minibatch Adam steps. Returns loss statistics averaged over all steps.
inline LossStats update(MlpParams& params, RolloutBuffer& buffer, const PpoConfig& cfg,
                        AdamState& adam, Rng& rng) {
  if (buffer.size() == 0) throw std::invalid_argument("update: empty buffer");
  if (buffer.advantages.size() != buffer.size())
    throw std::invalid_argument("update: advantages not computed");
  normalize_advantages(buffer);

  std::vector<std::size_t> order(buffer.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t mb =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.minibatch_size), order.size());

  MlpParams grads = MlpParams::zeros_like(params);
  LossStats mean_stats;
  std::size_t steps = 0;
  for (int epoch = 0; epoch < cfg.epochs_per_update; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(i)))]);
    for (std::size_t start = 0; start < order.size(); start += mb) {
      const std::size_t stop = std::min(start + mb, order.size());
      std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                     order.begin() + static_cast<std::ptrdiff_t>(stop));
      const LossStats stats = ppo_loss(params, buffer, batch, cfg, &grads);
      adam_step(params, grads, adam, cfg.learning_rate);
      mean_stats.policy_loss += stats.policy_loss;
      mean_stats.value_loss += stats.value_loss;
      mean_stats.entropy += stats.entropy;
      mean_stats.total += stats.total;
      ++steps;
    }
  }
  const double inv = 1.0 / static_cast<double>(steps);
  mean_stats.policy_loss *= inv;
  mean_stats.value_loss *= inv;
  mean_stats.entropy *= inv;
  mean_stats.total *= inv;
  return mean_stats;
}

struct TrainReportRow {
  int update = 0;
  long steps = 0;
  double mean_return = 0.0;
  double mean_length = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<TrainReportRow> rows;

  void write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "update,steps,mean_return,mean_length,policy_loss,value_loss,entropy,seconds\n";
    for (const TrainReportRow& r : rows) {
      out << r.update << ',' << r.steps << ',' << format_double(r.mean_return) << ','
          << format_double(r.mean_length) << ',' << format_double(r.policy_loss) << ','
          << format_double(r.value_loss) << ',' << format_double(r.entropy) << ','
          << format_double(r.seconds) << "\n";
    }
  }
};

// Produces per-episode mission configs; domain randomization redraws budgets
// per episode while the debris count stays fixed so observation sizes agree.
struct EnvFactory {
  env::MissionConfig base;
  bool randomized = false;

  env::MissionConfig make(Rng& rng) const {
    return randomized ? env::randomize_mission_config(rng, base) : base;
  }
};

// On-policy training loop. All randomness flows from cfg.seed: stream 0 seeds
// parameter init, stream 1 the episode configs and debris fields, stream 2
// minibatch shuffling, stream 3 action sampling.
inline std::pair<MlpParams, TrainReport> train(const EnvFactory& factory, const PpoConfig& cfg) {
  const int n = factory.base.n_debris;
  const int obs_dim = static_cast<int>(env::observation_size(n));
  const int n_actions = n + 1;

  Rng init_rng(derive_seed(cfg.seed, 0));
  Rng episode_rng(derive_seed(cfg.seed, 1));
  Rng update_rng(derive_seed(cfg.seed, 2));
  Rng action_rng(derive_seed(cfg.seed, 3));

  MlpParams params = init_params(obs_dim, n_actions, cfg.hidden_width, init_rng);
  AdamState adam = AdamState::like(params);
  TrainReport report;

  const long n_updates =
      (cfg.total_timesteps + cfg.batch_size - 1) / std::max(1, cfg.batch_size);
  long total_steps = 0;

  env::MissionState state;
  bool have_state = false;
  double ep_return = 0.0;
  long ep_length = 0;

  RolloutBuffer buffer;
  for (long u = 0; u < n_updates; ++u) {
    const auto t_start = std::chrono::steady_clock::now();
    buffer.clear();
    double sum_ep_return = 0.0, sum_ep_length = 0.0;
    long n_episodes = 0;
    bool last_done = false;

    while (buffer.size() < static_cast<std::size_t>(cfg.batch_size)) {
      if (!have_state) {
        int attempts = 0;
        for (;;) {
          const env::MissionConfig ep_cfg = factory.make(episode_rng);
          state = env::reset(ep_cfg, episode_rng.next_u64());
          ep_return = 0.0;
          ep_length = 0;
          if (!env::is_terminal(state).terminal) break;
          // Dead-on-arrival draws still count as completed zero-return episodes.
          sum_ep_return += 0.0;
          sum_ep_length += 0.0;
          ++n_episodes;
          if (++attempts > 10000)
            throw std::runtime_error("train: every reset is immediately terminal");
        }
        have_state = true;
      }

      const std::vector<double> obs_raw = env::observe(state);
      VectorXd obs = Eigen::Map<const VectorXd>(obs_raw.data(), static_cast<Eigen::Index>(obs_raw.size()));
      std::vector<std::uint8_t> mask = env::valid_action_mask(state);
      const ForwardResult fwd = forward(params, obs);
      const VectorXd logp = masked_log_softmax(fwd.logits, mask);
      const auto [action, action_logp] = sample_action(logp, action_rng, false);

      env::StepResult res = env::step(state, env::action_from_index(action, n));
      buffer.push(std::move(obs), std::move(mask), action, action_logp, res.reward, fwd.value,
                  res.terminated);
      ep_return += res.reward;
      ep_length += 1;
      total_steps += 1;
      last_done = res.terminated;

      if (res.terminated) {
        sum_ep_return += ep_return;
        sum_ep_length += static_cast<double>(ep_length);
        ++n_episodes;
        have_state = false;
      } else {
        state = std::move(res.state);
      }
    }

    double bootstrap = 0.0;
    if (!last_done) {
      const std::vector<double> obs_raw = env::observe(state);
      const VectorXd obs =
          Eigen::Map<const VectorXd>(obs_raw.data(), static_cast<Eigen::Index>(obs_raw.size()));
      bootstrap = forward(params, obs).value;
    }
    auto [adv, ret] =
        compute_gae(buffer.rewards, buffer.values, buffer.dones, cfg.discount, cfg.gae_lambda,
                    bootstrap);
    buffer.advantages = std::move(adv);
    buffer.returns = std::move(ret);

    const LossStats stats = update(params, buffer, cfg, adam, update_rng);
    const auto t_end = std::chrono::steady_clock::now();

    TrainReportRow row;
    row.update = static_cast<int>(u + 1);
    row.steps = total_steps;
    row.mean_return = n_episodes > 0 ? sum_ep_return / static_cast<double>(n_episodes) : 0.0;
    row.mean_length = n_episodes > 0 ? sum_ep_length / static_cast<double>(n_episodes) : 0.0;
    row.policy_loss = stats.policy_loss;
    row.value_loss = stats.value_loss;
    row.entropy = stats.entropy;
    row.seconds = std::chrono::duration<double>(t_end - t_start).count();
    report.rows.push_back(row);
  }

  return {std::move(params), std::move(report)};
}

}  // namespace adr::policy
