// Neighbor discovery by periodic hello broadcast.
#pragma once

#include <cstddef>

#include "qqmr/neighbor.hpp"
#include "qqmr/node.hpp"

namespace qqmr {

/// Snapshot of the node for broadcast. Increments the node's sequence number
/// (the first hello carries 1). Throws std::logic_error for a dead node.
HelloMessage build_hello(NodeState& node, double period);

enum class HelloOutcome : std::uint8_t { added, refreshed, stale };

/// Applies a received hello to the node's neighbor table. Stale or duplicate
/// sequence numbers and the node's own hellos are ignored.
HelloOutcome process_hello(NodeState& node, const HelloMessage& msg, double now, double expiry);

/// Drops entries with now - last_update > expiry. Returns how many went.
std::size_t purge_expired(NodeState& node, double now);

}  // namespace qqmr
