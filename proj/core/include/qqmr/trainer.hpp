// Episodic training of the three per-class policies against an abstract
// environment.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qqmr/policy_table.hpp"
#include "qqmr/rng.hpp"
#include "qqmr/types.hpp"

namespace qqmr {

/// What the trainer needs to know about the network. States are node ids and
/// an action is the next node.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::size_t node_count() const = 0;
  virtual NodeId sink() const = 0;

  /// Nodes that originate packets, in a fixed order.
  virtual std::vector<NodeId> sources() const = 0;

  /// Eligible next hops from `s` for policy p given the nodes already visited.
  virtual std::vector<NodeId> actions(TrafficClass p, NodeId s,
                                      std::span<const NodeId> visited) const = 0;

  /// Immediate reward for moving from `s` to `a`, in [-100, 100].
  virtual double reward(TrafficClass p, NodeId s, NodeId a) const = 0;
};

struct TrainerConfig {
  double alpha = 0.9;
  double gamma = 0.5;
  double epsilon_start = 0.9;
  double epsilon_decay = 0.99;
  double epsilon_floor = 0.05;
  std::uint32_t episodes = 500;
  std::uint32_t max_hops = 64;
  std::uint64_t seed = 0;
  std::size_t convergence_window = 20;
  double convergence_tolerance = 0.05;
};

struct TrainingResult {
  /// Per-episode value: mean discounted return over every walk in the episode.
  std::vector<double> episode_returns;
  std::optional<std::size_t> converged_episode;  // 1-based
};

/// One walk from `source` under policy p. Returns the discounted return and
/// updates Q_p of every visited node. Exposed for tests.
double run_walk(const Environment& env, std::vector<PolicySet>& tables, TrafficClass p,
                NodeId source, double epsilon, const TrainerConfig& config, Rng& rng);

/// Trains `tables` (indexed by node id) for config.episodes episodes. An
/// episode walks one packet of every class from every source.
TrainingResult train(const Environment& env, std::vector<PolicySet>& tables,
                     const TrainerConfig& config);

/// Greedy successor of every node under policy p (kInvalidNode if none).
std::vector<NodeId> greedy_policy(const Environment& env, const std::vector<PolicySet>& tables,
                                  TrafficClass p);

}  // namespace qqmr
