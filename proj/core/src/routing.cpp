#include "qqmr/routing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace qqmr {

DelayComponents link_delay(double queueing_delay, double access_delay, bool acked, double bits,
                           const LinkTiming& timing) {
  DelayComponents d;
  d.queueing = queueing_delay;
  d.access = acked ? access_delay + timing.ack_turnaround : timing.ack_timeout;
  d.transmission = bits / timing.bit_rate;
  return d;
}

double packet_loss_rate(const ErrorCounters& c) {
  return c.sent == 0 ? 0.0 : static_cast<double>(c.lost) / static_cast<double>(c.sent);
}

double packet_error_rate(const ErrorCounters& c) {
  return c.received == 0 ? 0.0 : static_cast<double>(c.corrupt) / static_cast<double>(c.received);
}

double error_rate(double plr, double per) { return 0.5 * plr + 0.5 * per; }

double error_rate(const ErrorCounters& c) {
  return error_rate(packet_loss_rate(c), packet_error_rate(c));
}

std::vector<LinkContext> normalize_context(std::span<const LinkContext> contexts) {
  if (contexts.empty()) throw std::invalid_argument("cannot normalize an empty neighbor set");
  double max_delay = 0.0;
  double max_error = 0.0;
  double max_energy = 0.0;
  double max_free = 0.0;
  for (const auto& c : contexts) {
    max_delay = std::max(max_delay, c.delay);
    max_error = std::max(max_error, c.error_rate);
    max_energy = std::max(max_energy, c.energy);
    max_free = std::max(max_free, c.free_buffer);
  }
  auto scaled = [](double v, double max) { return max > 0.0 ? v / max : 0.0; };
  std::vector<LinkContext> out;
  out.reserve(contexts.size());
  for (const auto& c : contexts) {
    out.push_back({c.neighbor, scaled(c.delay, max_delay), scaled(c.error_rate, max_error),
                   scaled(c.energy, max_energy), scaled(c.free_buffer, max_free)});
  }
  return out;
}

double class_reward(TrafficClass p, double membership, const LinkContext& n) {
  switch (p) {
    case TrafficClass::emergency:
      return membership * (std::exp(-n.delay) + (1.0 - std::exp(-n.free_buffer))) / 2.0;
    case TrafficClass::error_sensitive:
      return membership * std::exp(-n.error_rate);
    case TrafficClass::normal:
      return membership * (1.0 - std::exp(-n.energy));
  }
  return 0.0;
}

double immediate_reward(TrafficClass p, double membership, const LinkContext& normalized,
                        NextState next) {
  switch (next) {
    case NextState::sink: return kRewardMax;
    case NextState::local_minimum: return kRewardMin;
    case NextState::intermediate: break;
  }
  return std::clamp(100.0 * class_reward(p, membership, normalized), kRewardMin, kRewardMax);
}

double q_update(PolicyTable& table, NodeId s, NodeId a, double reward, double next_max,
                double alpha, double gamma) {
  const double q = (1.0 - alpha) * table.get(s, a) + alpha * (reward + gamma * next_max);
  table.set(s, a, q);
  return q;
}

double q_update(PolicyTable& table, NodeId s, NodeId a, double reward,
                const PolicyTable& next_table, NodeId s_next,
                std::span<const NodeId> next_actions, double alpha, double gamma) {
  return q_update(table, s, a, reward, next_table.max_value(s_next, next_actions), alpha, gamma);
}

double epsilon_at(std::uint64_t episode, double start, double decay, double floor) {
  return std::max(floor, start * std::pow(decay, static_cast<double>(episode)));
}

NodeId greedy_action(const PolicyTable& table, NodeId s, std::span<const NodeId> actions) {
  NodeId best = kInvalidNode;
  double best_q = -std::numeric_limits<double>::infinity();
  for (NodeId a : actions) {
    const double q = table.get(s, a);
    if (q > best_q || (q == best_q && a < best)) {
      best = a;
      best_q = q;
    }
  }
  return best;
}

NodeId select_action_eps_greedy(const PolicyTable& table, NodeId s,
                                std::span<const NodeId> actions, double epsilon, Rng& rng) {
  const double coin = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (actions.empty()) return kInvalidNode;
  if (coin < epsilon) {
    std::uniform_int_distribution<std::size_t> pick(0, actions.size() - 1);
    return actions[pick(rng)];
  }
  return greedy_action(table, s, actions);
}

NodeId select_main_route(const PolicySet& tables, TrafficClass p, NodeId s,
                         std::span<const NodeId> actions) {
  return greedy_action(tables[index_of(p)], s, actions);
}

std::vector<NodeId> backup_candidates(const PolicySet& tables, TrafficClass p, NodeId s,
                                      const ActionSets& actions, NodeId main) {
  std::vector<NodeId> out;
  const auto& own = actions[index_of(p)];
  const NodeId best_own = greedy_action(tables[index_of(p)], s, own);
  std::vector<NodeId> rest;
  for (NodeId a : own) {
    if (a != best_own) rest.push_back(a);
  }
  const NodeId second = greedy_action(tables[index_of(p)], s, rest);
  if (second != kInvalidNode) out.push_back(second);
  for (TrafficClass other : kAllClasses) {
    if (other == p) continue;
    const NodeId best = greedy_action(tables[index_of(other)], s, actions[index_of(other)]);
    if (best != kInvalidNode) out.push_back(best);
  }
  std::erase(out, main);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<BackupScore> score_backups(TrafficClass p, double beta,
                                       std::span<const CandidateQos> candidates, double main_q,
                                       double energy_max) {
  std::vector<BackupScore> out;
  if (candidates.empty()) return out;
  double max_delay = 0.0;
  double max_error = 0.0;
  double q_lo = main_q;
  double q_hi = main_q;
  for (const auto& c : candidates) {
    max_delay = std::max(max_delay, c.delay);
    max_error = std::max(max_error, c.error_rate);
    q_lo = std::min(q_lo, c.q);
    q_hi = std::max(q_hi, c.q);
  }
  for (const auto& c : candidates) {
    BackupScore s;
    s.action = c.action;
    switch (p) {
      case TrafficClass::emergency:
        s.compatibility = max_delay > 0.0 ? 1.0 - c.delay / max_delay : 1.0;
        break;
      case TrafficClass::error_sensitive:
        s.compatibility = max_error > 0.0 ? 1.0 - c.error_rate / max_error : 1.0;
        break;
      case TrafficClass::normal:
        s.compatibility = energy_max > 0.0 ? std::clamp(c.energy / energy_max, 0.0, 1.0) : 0.0;
        break;
    }
    s.q_normalized = q_hi > q_lo ? (c.q - q_lo) / (q_hi - q_lo) : 0.5;
    s.score = beta * s.compatibility + (1.0 - beta) * s.q_normalized;
    out.push_back(s);
  }
  return out;
}

NodeId select_backup(std::span<const BackupScore> scores) {
  NodeId best = kInvalidNode;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const auto& s : scores) {
    if (s.score > best_score || (s.score == best_score && s.action < best)) {
      best = s.action;
      best_score = s.score;
    }
  }
  return best;
}

bool is_local_minimum(std::span<const NeighborEntry> neighbors, Position self, Position sink) {
  const double own = euclidean_distance(self, sink);
  return std::none_of(neighbors.begin(), neighbors.end(), [&](const NeighborEntry& e) {
    return euclidean_distance(e.position, sink) < own;
  });
}

NodeId greedy_next_hop(std::span<const NeighborEntry> neighbors, Position self, Position sink) {
  NodeId best = kInvalidNode;
  double best_d = euclidean_distance(self, sink);
  for (const auto& e : neighbors) {
    const double d = euclidean_distance(e.position, sink);
    if (d < best_d || (d == best_d && best != kInvalidNode && e.neighbor_id < best)) {
      best = e.neighbor_id;
      best_d = d;
    }
  }
  return best;
}

std::vector<NodeId> eligible_actions(std::span<const NeighborEntry> neighbors, Position self,
                                     TrafficClass p, const EligibilityRule& rule,
                                     std::span<const NodeId> visited) {
  const double own = euclidean_distance(self, rule.sink);
  std::vector<const NeighborEntry*> open;
  std::vector<const NeighborEntry*> progress;
  for (const auto& e : neighbors) {
    if (std::find(visited.begin(), visited.end(), e.neighbor_id) != visited.end()) continue;
    open.push_back(&e);
    if (euclidean_distance(e.position, rule.sink) < own) progress.push_back(&e);
  }
  const auto& pool = progress.empty() ? open : progress;
  std::vector<NodeId> out;
  for (const NeighborEntry* e : pool) {
    if (e->neighbor_id == rule.sink_id ||
        e->memberships[index_of(p)] >= rule.membership_threshold) {
      out.push_back(e->neighbor_id);
    }
  }
  if (out.empty()) {
    for (const NeighborEntry* e : pool) out.push_back(e->neighbor_id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace qqmr
