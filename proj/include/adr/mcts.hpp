#pragma once

// Plain UCT search over mission states. Nodes own copies of their state, so
// simulations never touch the caller's environment. Each simulation backs up
// a single number: the undiscounted return accumulated from the root through
// selection, expansion and rollout. Every node has a unique root path, so
// sibling comparisons are unaffected by the shared reward prefix.

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "adr/env.hpp"
#include "adr/rng.hpp"

namespace adr::mcts {

struct MctsConfig {
  int simulations_per_step = 200;
  double c_uct = 1.5;
  int rollout_depth = 15;
  std::uint64_t seed = 0;
};

inline double uct_score(double q, double n_sa, double n_s, double c) {
  return q + c * std::sqrt(std::log(n_s) / (1.0 + n_sa));
}

struct EdgeStats {
  int visit_count = 0;
  double q_mean = 0.0;
};

struct SearchNode {
  env::MissionState state;
  bool terminal = false;
  env::TermReason term_reason = env::TermReason::kNone;
  int visit_count = 1;  // the creation visit
  std::vector<int> untried;

  struct Edge {
    EdgeStats stats;
    double reward = 0.0;  // immediate reward of stepping this edge
    std::unique_ptr<SearchNode> child;
  };
  std::map<int, Edge> children;

  explicit SearchNode(env::MissionState s) : state(std::move(s)) {
    const env::TerminalStatus t = env::is_terminal(state);
    terminal = t.terminal;
    term_reason = t.reason;
    if (!terminal) {
      const auto mask = env::valid_action_mask(state);
      for (int i = 0; i < static_cast<int>(mask.size()); ++i)
        if (mask[static_cast<std::size_t>(i)]) untried.push_back(i);
    }
  }
};

// Descend by argmax UCT until a node with untried actions or a terminal node.
// Ties break toward the lowest action index.
inline std::vector<std::pair<SearchNode*, int>> select(SearchNode& root, double c_uct = 1.5) {
  std::vector<std::pair<SearchNode*, int>> path;
  SearchNode* node = &root;
  while (!node->terminal && node->untried.empty() && !node->children.empty()) {
    int best_action = -1;
    double best_score = 0.0;
    for (const auto& [action, edge] : node->children) {
      const double score =
          uct_score(edge.stats.q_mean, edge.stats.visit_count, node->visit_count, c_uct);
      if (best_action < 0 || score > best_score) {
        best_action = action;
        best_score = score;
      }
    }
    path.emplace_back(node, best_action);
    node = node->children.at(best_action).child.get();
  }
  return path;
}

// Step one untried action chosen uniformly at random and attach the child.
inline std::pair<int, SearchNode*> expand(SearchNode& node, Rng& rng) {
  if (node.terminal) throw std::logic_error("expand: terminal node");
  if (node.untried.empty()) throw std::logic_error("expand: no untried actions");
  const int pick = rng.uniform_int(static_cast<int>(node.untried.size()));
  const int action = node.untried[static_cast<std::size_t>(pick)];
  node.untried.erase(node.untried.begin() + pick);

  const int n = static_cast<int>(node.state.debris.size());
  const env::StepResult res = env::step(node.state, env::action_from_index(action, n));
  SearchNode::Edge edge;
  edge.reward = res.reward;
  edge.child = std::make_unique<SearchNode>(res.state);
  SearchNode* child = edge.child.get();
  node.children.emplace(action, std::move(edge));
  return {action, child};
}

// Uniform-random masked playout for at most `depth` steps; returns the
// undiscounted sum of rewards collected.
inline double rollout(const env::MissionState& start, int depth, Rng& rng) {
  double total = 0.0;
  env::MissionState state = start;
  for (int d = 0; d < depth; ++d) {
    if (env::is_terminal(state).terminal) break;
    const auto mask = env::valid_action_mask(state);
    std::vector<int> feasible;
    for (int i = 0; i < static_cast<int>(mask.size()); ++i)
      if (mask[static_cast<std::size_t>(i)]) feasible.push_back(i);
    if (feasible.empty()) break;
    const int action = feasible[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(feasible.size())))];
    env::StepResult res =
        env::step(state, env::action_from_index(action, static_cast<int>(state.debris.size())));
    total += res.reward;
    state = std::move(res.state);
  }
  return total;
}

// Push one simulation's value through every edge on the path; each node on
// the path, including the root, gains a visit.
inline void backpropagate(const std::vector<std::pair<SearchNode*, int>>& path, double value) {
  for (const auto& [node, action] : path) {
    node->visit_count += 1;
    EdgeStats& st = node->children.at(action).stats;
    st.visit_count += 1;
    st.q_mean += (value - st.q_mean) / st.visit_count;
  }
}

struct PlanResult {
  env::Action action;
  std::unique_ptr<SearchNode> root;
};

inline PlanResult plan_with_tree(const env::MissionState& state, const MctsConfig& config) {
  auto root = std::make_unique<SearchNode>(state);
  if (root->terminal || root->untried.empty())
    throw std::runtime_error("mcts plan: no feasible action");
  Rng rng(config.seed);

  for (int sim = 0; sim < config.simulations_per_step; ++sim) {
    auto path = select(*root, config.c_uct);
    SearchNode* leaf = path.empty() ? root.get() : path.back().first->children.at(path.back().second).child.get();
    double value = 0.0;
    for (const auto& [node, action] : path) value += node->children.at(action).reward;
    if (!leaf->terminal && !leaf->untried.empty()) {
      const auto [action, child] = expand(*leaf, rng);
      path.emplace_back(leaf, action);
      value += leaf->children.at(action).reward;
      leaf = child;
    }
    if (!leaf->terminal) value += rollout(leaf->state, config.rollout_depth, rng);
    backpropagate(path, value);
  }

  // Robust child: most-visited root action, ties toward the lowest index.
  int best_action = -1;
  int best_visits = -1;
  for (const auto& [action, edge] : root->children) {
    if (edge.stats.visit_count > best_visits) {
      best_action = action;
      best_visits = edge.stats.visit_count;
    }
  }
  const int n = static_cast<int>(state.debris.size());
  return {env::action_from_index(best_action, n), std::move(root)};
}

inline env::Action plan(const env::MissionState& state, const MctsConfig& config) {
  return plan_with_tree(state, config).action;
}

}  // namespace adr::mcts
