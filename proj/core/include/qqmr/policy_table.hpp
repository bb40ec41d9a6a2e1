// Tabular action-value store for one learning policy.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "qqmr/types.hpp"

namespace qqmr {

/// Map (state, action) -> Q-value. States and actions are node identifiers;
/// missing entries read as zero.
class PolicyTable {
 public:
  struct Entry {
    NodeId state;
    NodeId action;
    double value;
  };

  double get(NodeId state, NodeId action) const;
  void set(NodeId state, NodeId action, double value);
  bool contains(NodeId state, NodeId action) const;

  /// Largest Q(state, a) over `actions`; 0 for an empty set.
  double max_value(NodeId state, std::span<const NodeId> actions) const;

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  void clear() { values_.clear(); }

  /// Entries sorted by (state, action).
  std::vector<Entry> entries() const;

  /// Order-independent 64-bit digest of the table contents.
  std::uint64_t fingerprint() const;

  void scale(double factor);

 private:
  static constexpr std::uint64_t key(NodeId s, NodeId a) {
    return (static_cast<std::uint64_t>(s) << 32) | a;
  }

  std::unordered_map<std::uint64_t, double> values_;
};

/// The three per-class tables held by one node (Q_1, Q_2, Q_3).
using PolicySet = std::array<PolicyTable, kClassCount>;

}  // namespace qqmr
