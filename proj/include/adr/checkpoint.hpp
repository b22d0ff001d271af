#pragma once

// Policy checkpoints as JSON: network shape, row-major weights at full double
// precision, and the training configuration that produced them.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "adr/ppo.hpp"

namespace adr::policy {

using nlohmann::json;

inline constexpr int kCheckpointVersion = 1;

namespace detail {

inline json matrix_to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json vector_to_json(const VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

inline MatrixXd matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols,
                                 const std::string& name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw std::runtime_error("checkpoint: shape mismatch for " + name);
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw std::runtime_error("checkpoint: shape mismatch for " + name);
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

inline VectorXd vector_from_json(const json& j, Eigen::Index size, const std::string& name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size)
    throw std::runtime_error("checkpoint: shape mismatch for " + name);
  VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
  return v;
}

}  // namespace detail

inline json ppo_config_to_json(const PpoConfig& c) {
  return json{{"learning_rate", c.learning_rate},
              {"clip_epsilon", c.clip_epsilon},
              {"discount", c.discount},
              {"gae_lambda", c.gae_lambda},
              {"batch_size", c.batch_size},
              {"minibatch_size", c.minibatch_size},
              {"epochs_per_update", c.epochs_per_update},
              {"value_coef", c.value_coef},
              {"entropy_coef", c.entropy_coef},
              {"hidden_width", c.hidden_width},
              {"total_timesteps", c.total_timesteps},
              {"domain_randomized", c.domain_randomized},
              {"seed", c.seed}};
}

inline PpoConfig ppo_config_from_json(const json& j) {
  PpoConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.clip_epsilon = j.at("clip_epsilon").get<double>();
  c.discount = j.at("discount").get<double>();
  c.gae_lambda = j.at("gae_lambda").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.minibatch_size = j.at("minibatch_size").get<int>();
  c.epochs_per_update = j.at("epochs_per_update").get<int>();
  c.value_coef = j.at("value_coef").get<double>();
  c.entropy_coef = j.at("entropy_coef").get<double>();
  c.hidden_width = j.at("hidden_width").get<int>();
  c.total_timesteps = j.at("total_timesteps").get<long>();
  c.domain_randomized = j.at("domain_randomized").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

struct Checkpoint {
  MlpParams params;
  PpoConfig config;
};

inline void save_checkpoint(const std::string& path, const MlpParams& params,
                            const PpoConfig& config) {
  json j;
  j["version"] = kCheckpointVersion;
  j["obs_dim"] = params.obs_dim();
  j["n_actions"] = params.n_actions();
  j["hidden"] = params.hidden();
  j["weights"] = json{{"w1", detail::matrix_to_json(params.w1)},
                      {"b1", detail::vector_to_json(params.b1)},
                      {"w2", detail::matrix_to_json(params.w2)},
                      {"b2", detail::vector_to_json(params.b2)},
                      {"w_pi", detail::matrix_to_json(params.w_pi)},
                      {"b_pi", detail::vector_to_json(params.b_pi)},
                      {"w_v", detail::matrix_to_json(params.w_v)},
                      {"b_v", detail::vector_to_json(params.b_v)}};
  j["config"] = ppo_config_to_json(config);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  json j = json::parse(in);
  if (j.at("version").get<int>() != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version");
  const auto obs_dim = j.at("obs_dim").get<Eigen::Index>();
  const auto n_actions = j.at("n_actions").get<Eigen::Index>();
  const auto hidden = j.at("hidden").get<Eigen::Index>();
  if (obs_dim <= 0 || n_actions <= 0 || hidden <= 0)
    throw std::runtime_error("checkpoint: bad dimensions");
  const json& w = j.at("weights");
  Checkpoint ck;
  ck.params.w1 = detail::matrix_from_json(w.at("w1"), hidden, obs_dim, "w1");
  ck.params.b1 = detail::vector_from_json(w.at("b1"), hidden, "b1");
  ck.params.w2 = detail::matrix_from_json(w.at("w2"), hidden, hidden, "w2");
  ck.params.b2 = detail::vector_from_json(w.at("b2"), hidden, "b2");
  ck.params.w_pi = detail::matrix_from_json(w.at("w_pi"), n_actions, hidden, "w_pi");
  ck.params.b_pi = detail::vector_from_json(w.at("b_pi"), n_actions, "b_pi");
  ck.params.w_v = detail::matrix_from_json(w.at("w_v"), 1, hidden, "w_v");
  ck.params.b_v = detail::vector_from_json(w.at("b_v"), 1, "b_v");
  ck.config = ppo_config_from_json(j.at("config"));
  return ck;
}

}  // namespace adr::policy
