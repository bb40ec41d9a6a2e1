#include "qqmr/trainer.hpp"

#include <numeric>
#include <stdexcept>

#include "qqmr/metrics.hpp"
#include "qqmr/routing.hpp"

namespace qqmr {

double run_walk(const Environment& env, std::vector<PolicySet>& tables, TrafficClass p,
                NodeId source, double epsilon, const TrainerConfig& config, Rng& rng) {
  const std::size_t pi = index_of(p);
  const NodeId sink = env.sink();
  std::vector<NodeId> visited{source};
  NodeId s = source;
  double total = 0.0;
  double discount = 1.0;
  for (std::uint32_t hop = 0; hop < config.max_hops && s != sink; ++hop) {
    const std::vector<NodeId> acts = env.actions(p, s, visited);
    const NodeId a = select_action_eps_greedy(tables[s][pi], s, acts, epsilon, rng);
    if (a == kInvalidNode) break;
    const double r = env.reward(p, s, a);
    total += discount * r;
    discount *= config.gamma;

    visited.push_back(a);
    double next_max = 0.0;
    bool terminal = a == sink;
    if (!terminal) {
      const std::vector<NodeId> next = env.actions(p, a, visited);
      terminal = next.empty();
      if (!terminal) next_max = tables[a][pi].max_value(a, next);
    }
    q_update(tables[s][pi], s, a, r, next_max, config.alpha, config.gamma);
    if (terminal) break;
    s = a;
  }
  return total;
}

TrainingResult train(const Environment& env, std::vector<PolicySet>& tables,
                     const TrainerConfig& config) {
  if (tables.size() < env.node_count()) tables.resize(env.node_count());
  const std::vector<NodeId> sources = env.sources();
  if (sources.empty()) throw std::invalid_argument("environment has no sources");
  Rng rng{config.seed};
  TrainingResult result;
  result.episode_returns.reserve(config.episodes);
  for (std::uint32_t episode = 0; episode < config.episodes; ++episode) {
    const double eps =
        epsilon_at(episode, config.epsilon_start, config.epsilon_decay, config.epsilon_floor);
    double sum = 0.0;
    std::size_t walks = 0;
    for (TrafficClass p : kAllClasses) {
      for (NodeId src : sources) {
        sum += run_walk(env, tables, p, src, eps, config, rng);
        ++walks;
      }
    }
    result.episode_returns.push_back(sum / static_cast<double>(walks));
  }
  result.converged_episode = track_convergence(result.episode_returns, config.convergence_window,
                                               config.convergence_tolerance);
  return result;
}

std::vector<NodeId> greedy_policy(const Environment& env, const std::vector<PolicySet>& tables,
                                  TrafficClass p) {
  std::vector<NodeId> out(env.node_count(), kInvalidNode);
  for (NodeId s = 0; s < env.node_count(); ++s) {
    if (s == env.sink()) continue;
    const NodeId visited[] = {s};
    const std::vector<NodeId> acts = env.actions(p, s, visited);
    out[s] = greedy_action(tables.at(s)[index_of(p)], s, acts);
  }
  return out;
}

}  // namespace qqmr
