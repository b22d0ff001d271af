#pragma once

// Actor-critic MLP: two tanh hidden layers feeding a masked-categorical policy
// head and a scalar value head. All math is double precision and hand-rolled
// so the backward pass can be checked against finite differences exactly.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "adr/rng.hpp"

namespace adr::policy {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Logit offset that realizes "masked = minus infinity" without non-finite
// arithmetic; exp() of anything this far below the max underflows to 0.
inline constexpr double kMaskedLogitOffset = -1e9;

struct MlpParams {
  MatrixXd w1, w2, w_pi, w_v;
  VectorXd b1, b2, b_pi, b_v;

  int obs_dim() const { return static_cast<int>(w1.cols()); }
  int hidden() const { return static_cast<int>(w1.rows()); }
  int n_actions() const { return static_cast<int>(w_pi.rows()); }

  std::size_t flat_size() const {
    return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() + b2.size() +
                                    w_pi.size() + b_pi.size() + w_v.size() + b_v.size());
  }

  template <typename Fn>
  void for_each(Fn&& fn) {
    fn(w1); fn(b1); fn(w2); fn(b2); fn(w_pi); fn(b_pi); fn(w_v); fn(b_v);
  }
  template <typename Fn>
  void for_each(Fn&& fn) const {
    fn(w1); fn(b1); fn(w2); fn(b2); fn(w_pi); fn(b_pi); fn(w_v); fn(b_v);
  }

  std::vector<double> to_flat() const {
    std::vector<double> flat;
    flat.reserve(flat_size());
    for_each([&](const auto& m) {
      for (Eigen::Index i = 0; i < m.size(); ++i) flat.push_back(m.data()[i]);
    });
    return flat;
  }

  void from_flat(const std::vector<double>& flat) {
    if (flat.size() != flat_size())
      throw std::invalid_argument("from_flat: size mismatch");
    std::size_t k = 0;
    for_each([&](auto& m) {
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = flat[k++];
    });
  }

  static MlpParams zeros_like(const MlpParams& other) {
    MlpParams g = other;
    g.for_each([](auto& m) { m.setZero(); });
    return g;
  }
};

namespace detail {

inline MatrixXd orthogonal(int rows, int cols, double gain, Rng& rng) {
  const int n = std::max(rows, cols);
  MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
  Eigen::HouseholderQR<MatrixXd> qr(a);
  MatrixXd q = qr.householderQ();
  // Fix the sign ambiguity so the result is a deterministic function of `a`.
  const MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return gain * q.topLeftCorner(rows, cols);
}

}  // namespace detail

// Orthogonal init with sqrt(2) gain on the trunk, a small policy head so the
// initial distribution is near uniform over valid actions, and a unit value head.
inline MlpParams init_params(int obs_dim, int n_actions, int hidden, Rng& rng) {
  if (obs_dim <= 0 || n_actions <= 0 || hidden <= 0)
    throw std::invalid_argument("init_params: dimensions must be positive");
  MlpParams p;
  const double root2 = std::sqrt(2.0);
  p.w1 = detail::orthogonal(hidden, obs_dim, root2, rng);
  p.b1 = VectorXd::Zero(hidden);
  p.w2 = detail::orthogonal(hidden, hidden, root2, rng);
  p.b2 = VectorXd::Zero(hidden);
  p.w_pi = detail::orthogonal(n_actions, hidden, 0.01, rng);
  p.b_pi = VectorXd::Zero(n_actions);
  p.w_v = detail::orthogonal(1, hidden, 1.0, rng);
  p.b_v = VectorXd::Zero(1);
  return p;
}

struct ForwardTrace {
  VectorXd a1, a2;  // post-tanh activations, enough to rebuild gradients
};

struct ForwardResult {
  VectorXd logits;
  double value = 0.0;
};

inline ForwardResult forward(const MlpParams& p, const VectorXd& obs, ForwardTrace* trace = nullptr) {
  if (obs.size() != p.w1.cols()) throw std::invalid_argument("forward: observation size mismatch");
  const VectorXd a1 = (p.w1 * obs + p.b1).array().tanh().matrix();
  const VectorXd a2 = (p.w2 * a1 + p.b2).array().tanh().matrix();
  ForwardResult out;
  out.logits = p.w_pi * a2 + p.b_pi;
  out.value = (p.w_v * a2 + p.b_v)(0);
  if (trace) {
    trace->a1 = a1;
    trace->a2 = a2;
  }
  return out;
}

// Log-probabilities of the masked categorical distribution. Masked entries
// get probability exactly zero (log-prob -inf); valid entries renormalize to
// the softmax restricted to the valid set. Stable for logits up to about 1e8.
inline VectorXd masked_log_softmax(const VectorXd& logits, const std::vector<std::uint8_t>& mask) {
  if (static_cast<std::size_t>(logits.size()) != mask.size())
    throw std::invalid_argument("masked_log_softmax: mask size mismatch");
  bool any = false;
  for (std::uint8_t m : mask) any = any || (m != 0);
  if (!any) throw std::invalid_argument("masked_log_softmax: empty mask");

  VectorXd shifted = logits;
  for (Eigen::Index i = 0; i < shifted.size(); ++i)
    if (!mask[static_cast<std::size_t>(i)]) shifted(i) += kMaskedLogitOffset;
  const double max_logit = shifted.maxCoeff();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < shifted.size(); ++i) sum += std::exp(shifted(i) - max_logit);
  const double log_norm = max_logit + std::log(sum);
  VectorXd logp(shifted.size());
  for (Eigen::Index i = 0; i < shifted.size(); ++i)
    logp(i) = mask[static_cast<std::size_t>(i)] ? shifted(i) - log_norm
                                                : -std::numeric_limits<double>::infinity();
  return logp;
}

// Draw an action from masked log-probs; deterministic mode takes the argmax,
// ties toward the lowest index. Returns (action, its log-prob).
inline std::pair<int, double> sample_action(const VectorXd& log_probs, Rng& rng,
                                            bool deterministic = false) {
  if (log_probs.size() == 0) throw std::invalid_argument("sample_action: empty distribution");
  if (deterministic) {
    int best = 0;
    for (Eigen::Index i = 1; i < log_probs.size(); ++i)
      if (log_probs(i) > log_probs(best)) best = static_cast<int>(i);
    return {best, log_probs(best)};
  }
  const double u = rng.uniform();
  double cum = 0.0;
  int last_valid = -1;
  for (Eigen::Index i = 0; i < log_probs.size(); ++i) {
    const double p = std::exp(log_probs(i));
    if (p > 0.0) last_valid = static_cast<int>(i);
    cum += p;
    if (u < cum) return {static_cast<int>(i), log_probs(i)};
  }
  if (last_valid < 0) throw std::invalid_argument("sample_action: no probability mass");
  return {last_valid, log_probs(last_valid)};
}

inline int act(const MlpParams& p, const VectorXd& obs, const std::vector<std::uint8_t>& mask,
               bool deterministic, Rng& rng) {
  const ForwardResult fwd = forward(p, obs);
  const VectorXd logp = masked_log_softmax(fwd.logits, mask);
  return sample_action(logp, rng, deterministic).first;
}

}  // namespace adr::policy
