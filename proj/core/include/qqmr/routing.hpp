// Per-class Q-learning policies: rewards, updates, and main/backup next-hop
// selection.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qqmr/neighbor.hpp"
#include "qqmr/policy_table.hpp"
#include "qqmr/rng.hpp"
#include "qqmr/types.hpp"

namespace qqmr {

inline constexpr double kRewardMax = 100.0;
inline constexpr double kRewardMin = -100.0;

// --- link context ---------------------------------------------------------

struct DelayComponents {
  double queueing = 0.0;      // L1
  double access = 0.0;        // L2
  double transmission = 0.0;  // L3

  double total() const { return queueing + access + transmission; }
};

struct LinkTiming {
  double bit_rate = 512e3;
  double ack_turnaround = 1e-4;
  double ack_timeout = 0.05;
};

/// L1 is the time the packet waited in the sender's buffer; L2 is the medium
/// access delay plus ACK turnaround, or the ACK timeout when no ACK came back;
/// L3 is bits / bit_rate.
DelayComponents link_delay(double queueing_delay, double access_delay, bool acked, double bits,
                           const LinkTiming& timing);

struct ErrorCounters {
  std::uint64_t lost = 0;
  std::uint64_t sent = 0;
  std::uint64_t corrupt = 0;
  std::uint64_t received = 0;
};

double packet_loss_rate(const ErrorCounters& c);
double packet_error_rate(const ErrorCounters& c);

/// xi = PLR / 2 + PER / 2, empty counters read as zero.
double error_rate(const ErrorCounters& c);
double error_rate(double plr, double per);

/// Raw QoS context of one candidate next hop.
struct LinkContext {
  NodeId neighbor = kInvalidNode;
  double delay = 0.0;        // L_ij, s
  double error_rate = 0.0;   // xi
  double energy = 0.0;       // E, J
  double free_buffer = 0.0;  // F, packets
};

/// Each field divided by its maximum over `contexts`; a zero maximum maps the
/// field to 0. Throws std::invalid_argument for an empty set.
std::vector<LinkContext> normalize_context(std::span<const LinkContext> contexts);

// --- rewards and updates -------------------------------------------------

enum class NextState : std::uint8_t { intermediate, sink, local_minimum };

/// R_p before the x100 scale, weighted by the sender's membership u_p.
double class_reward(TrafficClass p, double membership, const LinkContext& normalized);

/// +100 into the sink, -100 into a local minimum, 100 * R_p otherwise.
double immediate_reward(TrafficClass p, double membership, const LinkContext& normalized,
                        NextState next);

/// Q <- (1 - alpha) Q + alpha (r + gamma * next_max). Returns the new value.
double q_update(PolicyTable& table, NodeId s, NodeId a, double reward, double next_max,
                double alpha, double gamma);

/// Same update bootstrapping from max_a' Q(s_next, a') over `next_actions`
/// in `next_table` (the table of the node holding s_next).
double q_update(PolicyTable& table, NodeId s, NodeId a, double reward,
                const PolicyTable& next_table, NodeId s_next,
                std::span<const NodeId> next_actions, double alpha, double gamma);

/// max(floor, start * decay^episode)
double epsilon_at(std::uint64_t episode, double start, double decay, double floor);

// --- action selection ----------------------------------------------------

/// argmax_a Q(s, a) over `actions`, ties to the lowest id. kInvalidNode when
/// `actions` is empty.
NodeId greedy_action(const PolicyTable& table, NodeId s, std::span<const NodeId> actions);

/// With probability epsilon a uniform pick from `actions`, otherwise the
/// greedy action. Always consumes exactly one uniform draw for the coin.
/// kInvalidNode when `actions` is empty.
NodeId select_action_eps_greedy(const PolicyTable& table, NodeId s,
                                std::span<const NodeId> actions, double epsilon, Rng& rng);

/// a_p* = argmax over the policy's eligible actions.
NodeId select_main_route(const PolicySet& tables, TrafficClass p, NodeId s,
                         std::span<const NodeId> actions);

using ActionSets = std::array<std::vector<NodeId>, kClassCount>;

/// Second-best action of Q_p together with the best action of every other
/// policy, each over that policy's eligible set; the main action is removed
/// and duplicates merged. Sorted ascending.
std::vector<NodeId> backup_candidates(const PolicySet& tables, TrafficClass p, NodeId s,
                                      const ActionSets& actions, NodeId main);

struct CandidateQos {
  NodeId action = kInvalidNode;
  double delay = 0.0;
  double error_rate = 0.0;
  double energy = 0.0;
  double q = 0.0;  // Q_p(s, action)
};

struct BackupScore {
  NodeId action = kInvalidNode;
  double compatibility = 0.0;  // H
  double q_normalized = 0.0;   // Q~
  double score = 0.0;
};

/// Score = beta * H + (1 - beta) * Q~. H follows the main policy's class:
/// 1 - L/max L, 1 - xi/max xi, or E / energy_max. Q~ is min-max normalized
/// over the candidates and the main action's value; all-equal values give 0.5.
std::vector<BackupScore> score_backups(TrafficClass p, double beta,
                                       std::span<const CandidateQos> candidates, double main_q,
                                       double energy_max);

/// Highest score, ties to the lowest id. kInvalidNode when empty.
NodeId select_backup(std::span<const BackupScore> scores);

struct RouteDecision {
  NodeId main_action = kInvalidNode;
  NodeId backup_action = kInvalidNode;
  std::vector<NodeId> backup_candidates;
  std::vector<BackupScore> scores;
};

// --- geographic helpers --------------------------------------------------

/// No neighbor strictly closer to the sink than `self`.
bool is_local_minimum(std::span<const NeighborEntry> neighbors, Position self, Position sink);

/// Neighbor closest to the sink if strictly closer than `self`, else
/// kInvalidNode. Ties to the lowest id.
NodeId greedy_next_hop(std::span<const NeighborEntry> neighbors, Position self, Position sink);

struct EligibilityRule {
  NodeId sink_id = 0;
  Position sink;
  double membership_threshold = 0.25;
};

/// Actions open to policy p at a node. Neighbors already on the packet's
/// path are skipped; among the rest, those making progress toward the sink
/// are preferred when any exist. Within that set the neighbor must have
/// u_p >= threshold (the sink always qualifies), falling back to the whole
/// set when nobody does. Sorted ascending.
std::vector<NodeId> eligible_actions(std::span<const NeighborEntry> neighbors, Position self,
                                     TrafficClass p, const EligibilityRule& rule,
                                     std::span<const NodeId> visited);

}  // namespace qqmr
