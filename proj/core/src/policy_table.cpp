#include "qqmr/policy_table.hpp"

#include <algorithm>
#include <bit>
#include <limits>

#include "qqmr/rng.hpp"

namespace qqmr {

double PolicyTable::get(NodeId state, NodeId action) const {
  const auto it = values_.find(key(state, action));
  return it == values_.end() ? 0.0 : it->second;
}

void PolicyTable::set(NodeId state, NodeId action, double value) {
  values_[key(state, action)] = value;
}

bool PolicyTable::contains(NodeId state, NodeId action) const {
  return values_.contains(key(state, action));
}

double PolicyTable::max_value(NodeId state, std::span<const NodeId> actions) const {
  if (actions.empty()) return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (NodeId a : actions) best = std::max(best, get(state, a));
  return best;
}

std::vector<PolicyTable::Entry> PolicyTable::entries() const {
  std::vector<Entry> out;
  out.reserve(values_.size());
  for (const auto& [k, v] : values_) {
    out.push_back({static_cast<NodeId>(k >> 32), static_cast<NodeId>(k & 0xFFFFFFFFu), v});
  }
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) {
    return a.state != b.state ? a.state < b.state : a.action < b.action;
  });
  return out;
}

std::uint64_t PolicyTable::fingerprint() const {
  std::uint64_t digest = splitmix64(values_.size());
  for (const auto& [k, v] : values_) {
    digest += splitmix64(k ^ splitmix64(std::bit_cast<std::uint64_t>(v)));
  }
  return digest;
}

void PolicyTable::scale(double factor) {
  for (auto& kv : values_) kv.second *= factor;
}

}  // namespace qqmr
