// Hello message and neighbor-table record layouts.
#pragma once

#include <cstdint>
#include <vector>

#include "qqmr/types.hpp"

namespace qqmr {

struct HelloMessage {
  std::uint64_t hello_id = 0;
  double hello_period = 0.0;
  std::uint32_t sequence_number = 0;
  NodeId node_id = kInvalidNode;
  Position location;
  double residual_energy = 0.0;
  double free_buffer = 0.0;
  Memberships memberships = kUniformMemberships;
};

/// Link statistics a node gathers about one neighbor from its own traffic.
struct LinkObservation {
  double delay_estimate = 0.0;  // s, EWMA of measured L_ij
  std::uint64_t delay_samples = 0;
  std::uint64_t attempts = 0;
  std::uint64_t failures = 0;
  double remote_packet_error_rate = 0.0;  // PER reported by the neighbor in ACKs

  double packet_loss_rate() const {
    return attempts == 0 ? 0.0 : static_cast<double>(failures) / static_cast<double>(attempts);
  }
};

struct NeighborEntry {
  NodeId neighbor_id = kInvalidNode;
  Position position;
  double residual_energy = 0.0;
  double free_buffer = 0.0;
  Memberships memberships = kUniformMemberships;
  double last_update = 0.0;
  double expiry = 0.0;  // T_exp
  std::uint32_t last_seq = 0;
  LinkObservation link;
};

using NeighborTable = std::vector<NeighborEntry>;

}  // namespace qqmr
