// Per-node protocol state.
#pragma once

#include <cstdint>

#include "qqmr/neighbor.hpp"
#include "qqmr/policy_table.hpp"
#include "qqmr/queues.hpp"
#include "qqmr/types.hpp"

namespace qqmr {

struct NodeState {
  NodeId id = kInvalidNode;
  Position position;
  double residual_energy = 0.0;
  bool alive = true;
  bool is_sink = false;  // mains powered, never debited
  MultiQueueBuffer buffer;
  NeighborTable neighbors;
  PolicySet q_tables;
  Memberships memberships = kUniformMemberships;
  std::uint32_t hello_seq = 0;

  // Frames received as the addressed next hop, and how many failed the CRC.
  std::uint64_t frames_received = 0;
  std::uint64_t frames_corrupt = 0;

  const NeighborEntry* find_neighbor(NodeId id) const;
  NeighborEntry* find_neighbor(NodeId id);

  double packet_error_rate() const {
    return frames_received == 0
               ? 0.0
               : static_cast<double>(frames_corrupt) / static_cast<double>(frames_received);
  }
};

}  // namespace qqmr
