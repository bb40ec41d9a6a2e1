#include "qqmr/hello.hpp"

#include <algorithm>
#include <stdexcept>

namespace qqmr {

HelloMessage build_hello(NodeState& node, double period) {
  if (!node.alive) throw std::logic_error("dead node cannot send hello");
  ++node.hello_seq;
  HelloMessage msg;
  msg.hello_id = (static_cast<std::uint64_t>(node.id) << 32) | node.hello_seq;
  msg.hello_period = period;
  msg.sequence_number = node.hello_seq;
  msg.node_id = node.id;
  msg.location = node.position;
  msg.residual_energy = node.residual_energy;
  msg.free_buffer = node.buffer.free_space();
  msg.memberships = node.memberships;
  return msg;
}

HelloOutcome process_hello(NodeState& node, const HelloMessage& msg, double now, double expiry) {
  if (msg.node_id == node.id) return HelloOutcome::stale;
  NeighborEntry* entry = node.find_neighbor(msg.node_id);
  const bool fresh = entry == nullptr;
  if (fresh) {
    node.neighbors.push_back({});
    entry = &node.neighbors.back();
    entry->neighbor_id = msg.node_id;
  } else if (msg.sequence_number <= entry->last_seq) {
    return HelloOutcome::stale;
  }
  entry->position = msg.location;
  entry->residual_energy = msg.residual_energy;
  entry->free_buffer = msg.free_buffer;
  entry->memberships = msg.memberships;
  entry->last_update = now;
  entry->expiry = expiry;
  entry->last_seq = msg.sequence_number;
  return fresh ? HelloOutcome::added : HelloOutcome::refreshed;
}

std::size_t purge_expired(NodeState& node, double now) {
  const auto before = node.neighbors.size();
  std::erase_if(node.neighbors,
                [now](const NeighborEntry& e) { return now - e.last_update > e.expiry; });
  return before - node.neighbors.size();
}

}  // namespace qqmr
