#include "qqmr/net_model.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

#include "qqmr/rng.hpp"

namespace qqmr {

const NeighborEntry* NodeState::find_neighbor(NodeId nid) const {
  const auto it = std::find_if(neighbors.begin(), neighbors.end(),
                               [nid](const NeighborEntry& e) { return e.neighbor_id == nid; });
  return it == neighbors.end() ? nullptr : &*it;
}

NeighborEntry* NodeState::find_neighbor(NodeId nid) {
  const auto it = std::find_if(neighbors.begin(), neighbors.end(),
                               [nid](const NeighborEntry& e) { return e.neighbor_id == nid; });
  return it == neighbors.end() ? nullptr : &*it;
}

NetworkGraph::NetworkGraph(std::vector<NodeState> nodes, NodeId sink_id, double comm_range,
                           double area_side)
    : nodes_(std::move(nodes)), sink_id_(sink_id), comm_range_(comm_range), area_side_(area_side) {
  if (sink_id_ >= nodes_.size()) throw std::out_of_range("sink id not in graph");
  in_range_.resize(nodes_.size());
  // Grid buckets of side R keep construction near-linear for dense graphs.
  const double cell = comm_range_;
  const auto cells = static_cast<std::size_t>(std::max(1.0, std::ceil(area_side_ / cell))) + 1;
  auto bucket_of = [&](Position p) {
    const auto cx = std::min(cells - 1, static_cast<std::size_t>(std::max(0.0, p.x / cell)));
    const auto cy = std::min(cells - 1, static_cast<std::size_t>(std::max(0.0, p.y / cell)));
    return std::pair{cx, cy};
  };
  std::vector<std::vector<NodeId>> buckets(cells * cells);
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    const auto [cx, cy] = bucket_of(nodes_[i].position);
    buckets[cy * cells + cx].push_back(i);
  }
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    const auto [cx, cy] = bucket_of(nodes_[i].position);
    for (std::size_t dy = cy == 0 ? 0 : cy - 1; dy <= std::min(cells - 1, cy + 1); ++dy) {
      for (std::size_t dx = cx == 0 ? 0 : cx - 1; dx <= std::min(cells - 1, cx + 1); ++dx) {
        for (NodeId j : buckets[dy * cells + dx]) {
          if (j != i && euclidean_distance(nodes_[i].position, nodes_[j].position) <= comm_range_) {
            in_range_[i].push_back(j);
          }
        }
      }
    }
    std::sort(in_range_[i].begin(), in_range_[i].end());
  }
}

const NodeState& NetworkGraph::node(NodeId id) const {
  if (id >= nodes_.size()) throw std::out_of_range("unknown node id " + std::to_string(id));
  return nodes_[id];
}

NodeState& NetworkGraph::node(NodeId id) {
  if (id >= nodes_.size()) throw std::out_of_range("unknown node id " + std::to_string(id));
  return nodes_[id];
}

std::span<const NodeId> NetworkGraph::in_range(NodeId id) const {
  if (id >= nodes_.size()) throw std::out_of_range("unknown node id " + std::to_string(id));
  return in_range_[id];
}

std::vector<std::pair<NodeId, NodeId>> NetworkGraph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (!nodes_[i].alive) continue;
    for (NodeId j : in_range_[i]) {
      if (j > i && nodes_[j].alive) out.emplace_back(i, j);
    }
  }
  return out;
}

double NetworkGraph::distance(NodeId a, NodeId b) const {
  return euclidean_distance(node(a).position, node(b).position);
}

namespace {

QueueSettings queue_settings(const SimConfig& config) {
  QueueSettings q;
  q.total_capacity = config.buffer_capacity;
  q.ell1 = config.ell1;
  q.ell2 = config.ell2;
  q.min_capacity = config.min_queue_capacity();
  q.max_capacity = config.max_queue_capacity();
  q.rate_smoothing = config.rate_smoothing;
  return q;
}

NodeState make_node(NodeId id, Position where, const SimConfig& config, bool sink) {
  NodeState n;
  n.id = id;
  n.position = where;
  n.residual_energy = config.initial_energy;
  n.is_sink = sink;
  n.buffer = MultiQueueBuffer(queue_settings(config));
  return n;
}

}  // namespace

NetworkGraph graph_from_positions(const SimConfig& config, Position sink,
                                  std::span<const Position> users) {
  if (config.comm_range <= 0.0) throw ConfigError("comm_range", "must be > 0");
  std::vector<NodeState> nodes;
  nodes.reserve(users.size() + 1);
  nodes.push_back(make_node(0, sink, config, true));
  for (std::size_t k = 0; k < users.size(); ++k) {
    nodes.push_back(make_node(static_cast<NodeId>(k + 1), users[k], config, false));
  }
  return NetworkGraph(std::move(nodes), 0, config.comm_range, config.area_side);
}

NetworkGraph build_topology(const SimConfig& config) {
  if (config.node_count < 2) throw ConfigError("node_count", "need at least 2 WBAN users");
  if (config.comm_range <= 0.0) throw ConfigError("comm_range", "must be > 0");
  config.validate();
  Rng rng = make_rng(config.rng_seed, Stream::topology);
  std::uniform_real_distribution<double> coord(0.0, config.area_side);
  std::vector<Position> users(config.node_count);
  for (auto& p : users) {
    p.x = coord(rng);
    p.y = coord(rng);
  }
  const Position center{config.area_side / 2.0, config.area_side / 2.0};
  return graph_from_positions(config, center, users);
}

bool link_exists(const NetworkGraph& graph, NodeId i, NodeId j) {
  const NodeState& a = graph.node(i);
  const NodeState& b = graph.node(j);
  if (i == j || !a.alive || !b.alive) return false;
  return euclidean_distance(a.position, b.position) <= graph.comm_range();
}

}  // namespace qqmr
