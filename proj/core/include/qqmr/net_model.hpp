// Node placement, the link predicate and the network graph.
#pragma once

#include <span>
#include <utility>
#include <vector>

#include "qqmr/config.hpp"
#include "qqmr/node.hpp"
#include "qqmr/types.hpp"

namespace qqmr {

/// Static topology of one run. Node 0 is the sink; WBAN users are 1..N.
class NetworkGraph {
 public:
  NetworkGraph() = default;
  NetworkGraph(std::vector<NodeState> nodes, NodeId sink_id, double comm_range, double area_side);

  std::size_t size() const { return nodes_.size(); }
  NodeId sink_id() const { return sink_id_; }
  double comm_range() const { return comm_range_; }
  double area_side() const { return area_side_; }

  bool contains(NodeId id) const { return id < nodes_.size(); }

  /// Throws std::out_of_range for an unknown id.
  const NodeState& node(NodeId id) const;
  NodeState& node(NodeId id);

  std::span<NodeState> nodes() { return nodes_; }
  std::span<const NodeState> nodes() const { return nodes_; }

  /// Nodes within range of `id`, dead ones included, in ascending id order.
  std::span<const NodeId> in_range(NodeId id) const;

  /// Undirected edge list (i < j) among alive nodes.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

  double distance(NodeId a, NodeId b) const;
  double distance_to_sink(NodeId id) const { return distance(id, sink_id_); }

 private:
  std::vector<NodeState> nodes_;
  std::vector<std::vector<NodeId>> in_range_;
  NodeId sink_id_ = 0;
  double comm_range_ = 0.0;
  double area_side_ = 0.0;
};

/// Places `node_count` users uniformly at random in the square and the sink at
/// its center. Throws ConfigError for fewer than two users or a non-positive
/// range, and for any other invalid configuration.
NetworkGraph build_topology(const SimConfig& config);

/// Builds a graph from explicit coordinates. `users[k]` becomes node k + 1.
NetworkGraph graph_from_positions(const SimConfig& config, Position sink,
                                  std::span<const Position> users);

/// True iff i != j, both are alive, and they are within communication range.
/// Throws std::out_of_range for an unknown id.
bool link_exists(const NetworkGraph& graph, NodeId i, NodeId j);

}  // namespace qqmr
