#include "qqmr/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <ostream>
#include <map>
#include <queue>
#include <tuple>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "qqmr/channel.hpp"
#include "qqmr/frame.hpp"
#include "qqmr/hello.hpp"
#include "qqmr/rng.hpp"
#include "qqmr/routing.hpp"
#include "qqmr/trainer.hpp"

namespace qqmr {

std::string_view to_string(Protocol protocol) {
  return protocol == Protocol::qqmr ? "qqmr" : "greedy";
}

std::optional<Protocol> parse_protocol(std::string_view text) {
  if (text == "qqmr") return Protocol::qqmr;
  if (text == "greedy") return Protocol::greedy;
  return std::nullopt;
}

namespace {

constexpr double kDelaySmoothing = 0.5;

// Lower rank runs first among events at the same instant.
enum class EventKind : std::uint8_t {
  kill,
  tx_outcome,
  hello_tx,
  generate,
  inject,
  rebalance,
  recluster,
  sample,
};

struct Event {
  double time;
  EventKind kind;
  std::uint64_t seq;
  NodeId node;
  std::uint64_t aux;

  bool operator>(const Event& o) const {
    if (time != o.time) return time > o.time;
    if (kind != o.kind) return kind > o.kind;
    return seq > o.seq;
  }
};

struct Packet {
  std::uint64_t id = 0;
  TrafficClass cls = TrafficClass::normal;
  NodeId source = kInvalidNode;
  double created = 0.0;
  double enqueued_at = 0.0;
  std::vector<std::uint8_t> frame;
  std::vector<NodeId> path;
  double reward_sum = 0.0;
  std::uint32_t backup_hops = 0;
  bool tracked = false;
};

enum class Failure : std::uint8_t { none, unreachable, collision, corrupt, ack_lost };

// State of the one transmission a node may have outstanding.
struct Transmission {
  std::uint64_t packet = 0;
  NodeId main = kInvalidNode;
  NodeId backup = kInvalidNode;
  bool on_backup = false;
  NodeId target = kInvalidNode;
  double queue_delay = 0.0;
  double access = 0.0;
  double airtime = 0.0;
  bool data_sent = false;
  Failure failure = Failure::none;
  LinkContext main_ctx;
  LinkContext backup_ctx;
};

struct NodeRuntime {
  bool busy = false;
  bool killed = false;
  std::uint64_t decisions = 0;
  ErrorCounters errors;
  Transmission tx;
};

struct Injection {
  NodeId source;
  TrafficClass cls;
};

// Frozen view of the current neighbor tables for offline training.
class NeighborEnvironment final : public Environment {
 public:
  NeighborEnvironment(const NetworkGraph& graph, EligibilityRule rule, double initial_energy)
      : graph_(graph), rule_(rule), initial_energy_(initial_energy) {
    for (const NodeState& n : graph.nodes()) {
      if (n.alive && !n.is_sink) sources_.push_back(n.id);
    }
  }

  std::size_t node_count() const override { return graph_.size(); }
  NodeId sink() const override { return graph_.sink_id(); }
  std::vector<NodeId> sources() const override { return sources_; }

  std::vector<NodeId> actions(TrafficClass p, NodeId s,
                              std::span<const NodeId> visited) const override {
    const NodeState& n = graph_.node(s);
    return eligible_actions(n.neighbors, n.position, p, rule_, visited);
  }

  double reward(TrafficClass p, NodeId s, NodeId a) const override {
    const auto key = std::make_tuple(index_of(p), s, a);
    if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
    const NodeState& n = graph_.node(s);
    const NodeState& t = graph_.node(a);
    NextState next = NextState::intermediate;
    if (a == graph_.sink_id()) {
      next = NextState::sink;
    } else if (is_local_minimum(t.neighbors, t.position, rule_.sink)) {
      next = NextState::local_minimum;
    }
    const NodeId self[] = {s};
    std::vector<NodeId> pool = actions(p, s, self);
    if (std::find(pool.begin(), pool.end(), a) == pool.end()) pool.push_back(a);
    std::vector<LinkContext> raw;
    for (NodeId b : pool) raw.push_back(context(n, b));
    const auto norm = normalize_context(raw);
    const auto it = std::find_if(norm.begin(), norm.end(),
                                 [&](const LinkContext& c) { return c.neighbor == a; });
    const double r = immediate_reward(p, n.memberships[index_of(p)], *it, next);
    cache_.emplace(key, r);
    return r;
  }

 private:
  LinkContext context(const NodeState& n, NodeId b) const {
    LinkContext c;
    c.neighbor = b;
    const NeighborEntry* e = n.find_neighbor(b);
    if (e == nullptr) return c;
    c.delay = e->link.delay_estimate;
    c.error_rate = error_rate(e->link.packet_loss_rate(), e->link.remote_packet_error_rate);
    c.energy = b == graph_.sink_id() ? initial_energy_ : e->residual_energy;
    c.free_buffer = e->free_buffer;
    return c;
  }

  const NetworkGraph& graph_;
  EligibilityRule rule_;
  double initial_energy_;
  std::vector<NodeId> sources_;
  mutable std::map<std::tuple<std::size_t, NodeId, NodeId>, double> cache_;
};

}  // namespace

struct Simulation::Impl {
  SimConfig cfg;
  Protocol protocol;
  SimulationOptions opt;
  NetworkGraph graph;
  EnergyLedger ledger;
  RadioParams radio;
  ChannelModel channel;
  Rng traffic_rng;
  Rng routing_rng;
  std::vector<NodeRuntime> rt;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
  std::uint64_t next_seq = 0;
  std::uint64_t next_packet = 0;
  double now = 0.0;
  std::unordered_map<std::uint64_t, Packet> live;
  std::unordered_map<std::uint64_t, PacketTrace> traces;
  std::unordered_map<std::uint64_t, Injection> injections;
  MetricsAccumulator acc;
  std::vector<LogRecord> log;
  ClosureCheck closure;
  std::vector<ClusterModel> rounds;
  std::uint64_t cluster_round = 0;
  std::optional<TrainingResult> pretraining;
  bool finished = false;

  Impl(const SimConfig& c, Protocol p, SimulationOptions o)
      : cfg(c),
        protocol(p),
        opt(std::move(o)),
        graph(make_graph(c, opt)),
        ledger(graph.size(), opt.keep_energy_events),
        radio(RadioParams::from(c)),
        channel(ChannelParams::from(c), make_rng(c.rng_seed, Stream::channel)),
        traffic_rng(make_rng(c.rng_seed, Stream::traffic)),
        routing_rng(make_rng(c.rng_seed, Stream::routing)),
        rt(graph.size()) {
    if (protocol == Protocol::greedy) {
      for (NodeState& n : graph.nodes()) {
        QueueSettings s = n.buffer.settings();
        s.discipline = QueueDiscipline::shared_fifo;
        n.buffer = MultiQueueBuffer(s);
      }
    }
    schedule_initial();
  }

  static NetworkGraph make_graph(const SimConfig& c, const SimulationOptions& o) {
    c.validate();
    if (o.user_positions.empty()) {
      if (o.sink_position) {
        NetworkGraph random = build_topology(c);
        std::vector<Position> users;
        for (const NodeState& n : random.nodes()) {
          if (!n.is_sink) users.push_back(n.position);
        }
        return graph_from_positions(c, *o.sink_position, users);
      }
      return build_topology(c);
    }
    const Position center{c.area_side / 2.0, c.area_side / 2.0};
    return graph_from_positions(c, o.sink_position.value_or(center), o.user_positions);
  }

  // --- scheduling -------------------------------------------------------

  void schedule(double t, EventKind kind, NodeId node = kInvalidNode, std::uint64_t aux = 0) {
    events.push({t, kind, next_seq++, node, aux});
  }

  void schedule_initial() {
    std::uniform_real_distribution<double> jitter(0.0, cfg.hello_interval);
    for (NodeId i = 0; i < graph.size(); ++i) schedule(jitter(traffic_rng), EventKind::hello_tx, i);
    if (opt.generate_traffic) {
      for (NodeId i = 0; i < graph.size(); ++i) {
        if (i == graph.sink_id()) continue;
        schedule(cfg.warmup + next_arrival_gap(), EventKind::generate, i);
      }
    }
    schedule(cfg.queue_update_interval, EventKind::rebalance);
    if (protocol == Protocol::qqmr) schedule(cfg.warmup, EventKind::recluster);
    if (opt.check_closure && opt.sample_interval > 0.0) schedule(opt.sample_interval, EventKind::sample);
  }

  double next_arrival_gap() {
    return std::exponential_distribution<double>(cfg.send_rate)(traffic_rng);
  }

  // --- logging ------------------------------------------------------------

  void emit(const LogRecord& r) {
    acc.consume(r);
    if (opt.record_log) log.push_back(r);
  }

  void emit(LogKind kind, NodeId subject, std::uint64_t packet = 0,
            TrafficClass cls = TrafficClass::normal, double value = 0.0, std::uint32_t code = 0) {
    emit(LogRecord{now, kind, subject, packet, cls, value, code});
  }

  void control(ControlKind kind, NodeId sender, std::uint32_t count = 1) {
    for (std::uint32_t k = 0; k < count; ++k) {
      emit(LogKind::control_tx, sender, 0, TrafficClass::normal, 0.0,
           static_cast<std::uint32_t>(kind));
    }
  }

  // --- energy -------------------------------------------------------------

  /// Debits the node and logs the energy actually taken. False when the
  /// node could not pay (it is dead afterwards).
  bool spend(NodeId id, double joules, EnergyUse use) {
    NodeState& n = graph.node(id);
    if (n.is_sink) return true;
    if (!n.alive) return false;
    const double before = ledger.consumed(id);
    const DebitResult result = debit(n, joules, ledger, use, now);
    const double taken = ledger.consumed(id) - before;
    if (taken > 0.0) {
      emit(LogKind::energy, id, 0, TrafficClass::normal, taken, static_cast<std::uint32_t>(use));
    }
    if (!n.alive) on_death(id);
    return result == DebitResult::accepted;
  }

  void on_death(NodeId id) {
    emit(LogKind::death, id);
    NodeState& n = graph.node(id);
    NodeRuntime& r = rt[id];
    if (r.busy) {
      r.busy = false;
      if (live.contains(r.tx.packet)) drop(r.tx.packet, DropCause::energy, id);
    }
    for (const auto& item : n.buffer.drain()) drop(item.handle, DropCause::energy, id);
  }

  // --- packet bookkeeping -------------------------------------------------

  void finish(Packet& p, PacketFate fate, DropCause cause) {
    emit(LogKind::reward, p.source, p.id, p.cls, p.reward_sum);
    if (p.tracked) {
      PacketTrace& t = traces.at(p.id);
      t.fate = fate;
      t.cause = cause;
      t.path = p.path;
      t.backup_hops = p.backup_hops;
      t.finished = now;
    }
    live.erase(p.id);
  }

  void drop(std::uint64_t id, DropCause cause, NodeId where) {
    Packet& p = live.at(id);
    emit(LogKind::dropped, where, p.id, p.cls, 0.0, static_cast<std::uint32_t>(cause));
    finish(p, PacketFate::dropped, cause);
  }

  void create_packet(NodeId source, TrafficClass cls, std::uint64_t id, bool tracked) {
    Packet p;
    p.id = id;
    p.cls = cls;
    p.source = source;
    p.created = now;
    p.tracked = tracked;
    p.path.push_back(source);
    DataPacket frame;
    frame.header = static_cast<std::uint16_t>(id & 0xFFFF);
    frame.packet_type = packet_type_of(cls);
    frame.source_id = static_cast<std::uint8_t>(source & 0xFF);
    frame.destination_id = static_cast<std::uint8_t>(graph.sink_id() & 0xFF);
    frame.timestamp_ms = static_cast<std::uint32_t>(std::llround(now * 1000.0));
    frame.payload.resize(cfg.packet_size);
    for (std::size_t k = 0; k < frame.payload.size(); ++k) {
      frame.payload[k] = static_cast<std::uint8_t>((id * 31 + k) & 0xFF);
    }
    p.frame = seal(frame);
    if (tracked) {
      PacketTrace t;
      t.id = id;
      t.cls = cls;
      t.source = source;
      t.created = now;
      t.path = p.path;
      traces[id] = t;
    }
    live.emplace(id, std::move(p));
    emit(LogKind::generated, source, id, cls);
    if (!graph.node(source).alive) {
      drop(id, DropCause::energy, source);
      return;
    }
    if (admit(source, id)) start_service(source);
  }

  bool admit(NodeId node, std::uint64_t id) {
    NodeState& n = graph.node(node);
    Packet& p = live.at(id);
    p.enqueued_at = now;
    if (n.buffer.enqueue(p.cls, id, now) == EnqueueResult::accepted) return true;
    if (protocol == Protocol::qqmr) {
      n.buffer.rebalance();
      if (n.buffer.enqueue(p.cls, id, now) == EnqueueResult::accepted) return true;
    }
    drop(id, DropCause::overflow, node);
    return false;
  }

  // --- forwarding ----------------------------------------------------------

  std::uint32_t backlogged_around(NodeId id) const {
    std::uint32_t count = 0;
    for (NodeId j : graph.in_range(id)) {
      const NodeState& n = graph.node(j);
      if (n.alive && !n.is_sink && (rt[j].busy || !n.buffer.empty())) ++count;
    }
    return count;
  }

  EligibilityRule rule() const {
    return {graph.sink_id(), graph.node(graph.sink_id()).position, cfg.membership_threshold};
  }

  LinkContext raw_context(const NodeState& n, NodeId neighbor) const {
    const NeighborEntry* e = n.find_neighbor(neighbor);
    LinkContext c;
    c.neighbor = neighbor;
    if (e == nullptr) return c;
    c.delay = e->link.delay_estimate;
    c.error_rate = error_rate(e->link.packet_loss_rate(), e->link.remote_packet_error_rate);
    c.energy = neighbor == graph.sink_id() ? cfg.initial_energy : e->residual_energy;
    c.free_buffer = e->free_buffer;
    return c;
  }

  void start_service(NodeId id) {
    NodeState& n = graph.node(id);
    NodeRuntime& r = rt[id];
    while (!r.busy && n.alive && !n.is_sink && !n.buffer.empty()) {
      const auto item = n.buffer.dequeue_next();
      Packet& p = live.at(item->handle);
      if (p.path.size() - 1 >= cfg.max_hops) {
        drop(p.id, DropCause::ttl, id);
        continue;
      }
      Transmission tx;
      tx.packet = p.id;
      tx.queue_delay = now - item->enqueued_at;
      if (!route(id, p, tx)) continue;
      r.busy = true;
      r.tx = tx;
      transmit(id, tx.main, false);
    }
  }

  /// Fills main/backup. False if the packet was dropped for lack of a route.
  bool route(NodeId id, Packet& p, Transmission& tx) {
    NodeState& n = graph.node(id);
    const Position sink_pos = graph.node(graph.sink_id()).position;
    if (protocol == Protocol::greedy) {
      tx.main = greedy_next_hop(n.neighbors, n.position, sink_pos);
      if (tx.main == kInvalidNode) {
        drop(p.id, DropCause::no_route, id);
        return false;
      }
      return true;
    }

    const EligibilityRule eligibility = rule();
    ActionSets sets;
    for (TrafficClass c : kAllClasses) {
      sets[index_of(c)] = eligible_actions(n.neighbors, n.position, c, eligibility, p.path);
    }
    const auto& acts = sets[index_of(p.cls)];
    if (acts.empty()) {
      p.reward_sum += kRewardMin;
      drop(p.id, DropCause::no_route, id);
      return false;
    }
    NodeRuntime& r = rt[id];
    const double eps =
        epsilon_at(r.decisions++, cfg.epsilon_start, cfg.epsilon_decay, cfg.epsilon_floor);
    const PolicyTable& q = n.q_tables[index_of(p.cls)];
    tx.main = select_action_eps_greedy(q, id, acts, eps, routing_rng);

    std::vector<LinkContext> raw;
    raw.reserve(acts.size());
    for (NodeId a : acts) raw.push_back(raw_context(n, a));
    const std::vector<LinkContext> norm = normalize_context(raw);
    auto ctx_of = [&](NodeId a) {
      for (const auto& c : norm) {
        if (c.neighbor == a) return c;
      }
      // Backups drawn from another policy's set are normalized on their own.
      return normalize_context(std::vector<LinkContext>{raw_context(n, a)}).front();
    };
    tx.main_ctx = ctx_of(tx.main);

    const std::vector<NodeId> cands = backup_candidates(n.q_tables, p.cls, id, sets, tx.main);
    if (!cands.empty()) {
      std::vector<CandidateQos> qos;
      for (NodeId c : cands) {
        const LinkContext lc = raw_context(n, c);
        qos.push_back({c, lc.delay, lc.error_rate, lc.energy, q.get(id, c)});
      }
      const auto scores = score_backups(p.cls, n.memberships[index_of(p.cls)], qos,
                                        q.get(id, tx.main), cfg.initial_energy);
      tx.backup = select_backup(scores);
      if (tx.backup != kInvalidNode) tx.backup_ctx = ctx_of(tx.backup);
    }
    return true;
  }

  void transmit(NodeId id, NodeId target, bool on_backup) {
    NodeRuntime& r = rt[id];
    Transmission& tx = r.tx;
    tx.on_backup = on_backup;
    tx.target = target;
    tx.data_sent = false;
    tx.failure = Failure::none;
    Packet& p = live.at(tx.packet);
    const double d = graph.distance(id, target);
    const double rts_bits = cfg.rts_bytes * 8.0;
    const double cts_bits = cfg.cts_bytes * 8.0;
    const double data_bits = static_cast<double>(p.frame.size()) * 8.0;

    const std::uint32_t backlog = backlogged_around(id);
    const std::uint32_t rts = channel.sample_rts_attempts(backlog);
    tx.access = channel.sample_contention_delay(backlog) + rts * rts_bits / cfg.bit_rate;
    tx.airtime = data_bits / cfg.bit_rate;

    control(ControlKind::rts, id, rts);
    if (!spend(id, rts * tx_energy(rts_bits, d, radio), EnergyUse::tx)) return;
    if (!link_exists(graph, id, target)) {
      tx.failure = Failure::unreachable;
      schedule(now + tx.access + cfg.ack_timeout, EventKind::tx_outcome, id);
      return;
    }
    const bool answered = spend(target, rts * rx_energy(rts_bits, radio), EnergyUse::rx) &&
                          spend(target, tx_energy(cts_bits, d, radio), EnergyUse::tx);
    if (!answered) {
      tx.failure = Failure::unreachable;
      schedule(now + tx.access + cfg.ack_timeout, EventKind::tx_outcome, id);
      return;
    }
    control(ControlKind::cts, target);
    if (!spend(id, rx_energy(cts_bits, radio), EnergyUse::rx)) return;
    tx.access += cts_bits / cfg.bit_rate;

    emit(LogKind::data_tx, id, p.id, p.cls);
    tx.data_sent = true;
    if (!spend(id, tx_energy(data_bits, d, radio), EnergyUse::tx)) return;

    if (channel.sample_collision(backlog, d, graph.comm_range())) {
      tx.failure = Failure::collision;
    } else if (!spend(target, rx_energy(data_bits, radio), EnergyUse::rx)) {
      tx.failure = Failure::unreachable;
    } else {
      NodeState& t = graph.node(target);
      const std::uint64_t flips = channel.sample_bit_flips(p.frame.size() * 8);
      if (flips > 0) {
        std::vector<std::uint8_t> copy = p.frame;
        channel.corrupt(copy, flips);
        ++t.frames_received;
        if (verify_checksum(copy) == ChecksumStatus::corrupt) {
          ++t.frames_corrupt;
          tx.failure = Failure::corrupt;
        } else {
          p.frame = std::move(copy);
        }
      } else {
        ++t.frames_received;
      }
      if (tx.failure == Failure::none) {
        const double ack_bits = cfg.ack_bytes * 8.0;
        control(ControlKind::ack, target);
        spend(target, tx_energy(ack_bits, d, radio), EnergyUse::tx);
        if (!spend(id, rx_energy(ack_bits, radio), EnergyUse::rx)) return;
        if (channel.sample_ack_loss()) tx.failure = Failure::ack_lost;
      }
    }
    const double wait = tx.failure == Failure::none ? cfg.ack_turnaround : cfg.ack_timeout;
    schedule(now + tx.access + tx.airtime + wait, EventKind::tx_outcome, id);
  }

  void on_tx_outcome(NodeId id) {
    NodeRuntime& r = rt[id];
    NodeState& n = graph.node(id);
    if (!r.busy) return;
    Transmission tx = r.tx;
    auto it = live.find(tx.packet);
    if (it == live.end()) {
      r.busy = false;
      start_service(id);
      return;
    }
    Packet& p = it->second;
    if (!n.alive) {
      r.busy = false;
      drop(p.id, DropCause::energy, id);
      return;
    }
    NodeState& target = graph.node(tx.target);
    Failure failure = tx.failure;
    if (failure == Failure::none && !target.alive) failure = Failure::unreachable;

    NeighborEntry* entry = n.find_neighbor(tx.target);
    const LinkTiming timing{cfg.bit_rate, cfg.ack_turnaround, cfg.ack_timeout};
    const DelayComponents delay = link_delay(tx.queue_delay, tx.access, failure == Failure::none,
                                             tx.data_sent ? tx.airtime * cfg.bit_rate : 0.0, timing);
    ++r.errors.sent;
    if (entry != nullptr) {
      ++entry->link.attempts;
      entry->link.delay_estimate =
          entry->link.delay_samples == 0
              ? delay.total()
              : (1.0 - kDelaySmoothing) * entry->link.delay_estimate + kDelaySmoothing * delay.total();
      ++entry->link.delay_samples;
    }
    const TrafficClass cls = p.cls;
    PolicyTable& q = n.q_tables[index_of(cls)];

    if (failure == Failure::none || failure == Failure::ack_lost) {
      if (entry != nullptr) entry->link.remote_packet_error_rate = target.packet_error_rate();
      if (failure == Failure::ack_lost) {
        ++r.errors.lost;
        if (entry != nullptr) ++entry->link.failures;
      }
      if (protocol == Protocol::qqmr) {
        const LinkContext& ctx = tx.on_backup ? tx.backup_ctx : tx.main_ctx;
        double reward = kRewardMin;
        double next_max = 0.0;
        if (failure == Failure::none) {
          const Position sink_pos = graph.node(graph.sink_id()).position;
          NextState next = NextState::intermediate;
          if (tx.target == graph.sink_id()) {
            next = NextState::sink;
          } else if (is_local_minimum(target.neighbors, target.position, sink_pos)) {
            next = NextState::local_minimum;
          }
          reward = immediate_reward(cls, n.memberships[index_of(cls)], ctx, next);
          if (next == NextState::intermediate) {
            std::vector<NodeId> visited = p.path;
            visited.push_back(tx.target);
            const auto acts = eligible_actions(target.neighbors, target.position, cls, rule(), visited);
            next_max = target.q_tables[index_of(cls)].max_value(tx.target, acts);
          }
        }
        q_update(q, id, tx.target, reward, next_max, cfg.alpha, cfg.gamma);
        p.reward_sum += reward;
      }
      p.path.push_back(tx.target);
      if (tx.on_backup) ++p.backup_hops;
      r.busy = false;
      const std::uint64_t pid = p.id;
      if (tx.target == graph.sink_id()) {
        const double received = now - (failure == Failure::none ? cfg.ack_turnaround : cfg.ack_timeout);
        emit(LogKind::delivered, tx.target, pid, cls, received - p.created,
             static_cast<std::uint32_t>(p.path.size() - 1));
        finish(p, PacketFate::delivered, DropCause::link);
      } else if (admit(tx.target, pid)) {
        start_service(tx.target);
      }
      start_service(id);
      return;
    }

    ++r.errors.lost;
    if (entry != nullptr) ++entry->link.failures;
    if (!tx.on_backup && tx.backup != kInvalidNode) {
      transmit(id, tx.backup, true);
      return;
    }
    r.busy = false;
    drop(p.id, failure == Failure::corrupt ? DropCause::corrupt : DropCause::link, id);
    start_service(id);
  }

  // --- periodic tasks --------------------------------------------------------

  void on_hello(NodeId id) {
    NodeState& n = graph.node(id);
    if (!n.alive) return;
    purge_expired(n, now);
    const double bits = cfg.hello_bytes * 8.0;
    control(ControlKind::hello, id);
    if (!spend(id, tx_energy(bits, graph.comm_range(), radio), EnergyUse::tx)) return;
    const HelloMessage msg = build_hello(n, cfg.hello_interval);
    const std::uint32_t backlog = backlogged_around(id);
    const double clean = clean_frame_probability(channel.params(), static_cast<std::uint64_t>(bits));
    for (NodeId j : graph.in_range(id)) {
      NodeState& m = graph.node(j);
      if (!m.alive) continue;
      if (channel.sample_collision(backlog, graph.distance(id, j), graph.comm_range())) continue;
      if (!spend(j, rx_energy(bits, radio), EnergyUse::rx)) continue;
      if (!channel.sample_bernoulli(clean)) continue;
      process_hello(m, msg, now, cfg.hello_expiry());
    }
    schedule(now + cfg.hello_interval, EventKind::hello_tx, id);
  }

  void on_generate(NodeId id) {
    if (!graph.node(id).alive) return;
    std::discrete_distribution<std::size_t> mix(cfg.traffic_mix.begin(), cfg.traffic_mix.end());
    const TrafficClass cls = class_at(mix(traffic_rng));
    const double next = now + next_arrival_gap();
    create_packet(id, cls, next_packet++, false);
    if (next <= cfg.sim_duration) schedule(next, EventKind::generate, id);
  }

  void on_rebalance() {
    for (NodeState& n : graph.nodes()) {
      if (!n.alive || n.is_sink) continue;
      n.buffer.close_window(cfg.queue_update_interval);
      n.buffer.rebalance();
    }
    schedule(now + cfg.queue_update_interval, EventKind::rebalance);
  }

  void on_recluster() {
    std::vector<NodeId> ids;
    std::vector<FeatureVector> raw;
    for (const NodeState& n : graph.nodes()) {
      if (!n.alive || n.is_sink) continue;
      double delay_sum = 0.0;
      std::size_t measured = 0;
      for (const auto& e : n.neighbors) {
        if (e.link.delay_samples == 0) continue;
        delay_sum += e.link.delay_estimate;
        ++measured;
      }
      const ErrorCounters& ec = rt[n.id].errors;
      FeatureVector f{};
      f[0] = measured == 0 ? std::nan("") : delay_sum / static_cast<double>(measured);
      f[1] = n.buffer.free_space();
      f[2] = error_rate(packet_loss_rate(ec), n.packet_error_rate());
      f[3] = n.residual_energy;
      ids.push_back(n.id);
      raw.push_back(f);
    }
    if (ids.size() >= kClusterCount) {
      WfcmParams params;
      params.m = cfg.fuzziness;
      params.max_iter = cfg.max_iter;
      params.tol = cfg.tol;
      params.learn_min = cfg.learn_min;
      params.learn_max = cfg.learn_max;
      params.seed = derive_seed(cfg.rng_seed, Stream::clustering, cluster_round);
      const std::vector<FeatureVector> x = normalize_features(raw);
      ClusterModel model = run_wfcm(x, params);
      const double bits = cfg.hello_bytes * 8.0;
      for (std::size_t k = 0; k < ids.size(); ++k) {
        NodeState& n = graph.node(ids[k]);
        n.memberships = model.memberships[k];
        control(ControlKind::membership, graph.sink_id());
        spend(ids[k], rx_energy(bits, radio), EnergyUse::rx);
        if (opt.cluster_dump != nullptr) {
          *opt.cluster_dump << fmt::format("{},{},{:.17g},{:.17g},{:.17g}\n", cluster_round, ids[k],
                                           n.memberships[0], n.memberships[1], n.memberships[2]);
        }
      }
      rounds.push_back(std::move(model));
    }
    if (cluster_round == 0 && cfg.pretrain_episodes > 0) pretrain();
    ++cluster_round;
    schedule(now + cfg.recluster_interval, EventKind::recluster);
  }

  void pretrain() {
    const NeighborEnvironment env(graph, rule(), cfg.initial_energy);
    if (env.sources().empty()) return;
    std::vector<PolicySet> tables(graph.size());
    for (const NodeState& n : graph.nodes()) tables[n.id] = n.q_tables;
    TrainerConfig tc;
    tc.alpha = cfg.alpha;
    tc.gamma = cfg.gamma;
    tc.epsilon_start = cfg.epsilon_start;
    tc.epsilon_decay = cfg.epsilon_decay;
    tc.epsilon_floor = cfg.epsilon_floor;
    tc.episodes = cfg.pretrain_episodes;
    tc.max_hops = cfg.max_hops;
    tc.seed = derive_seed(cfg.rng_seed, Stream::training, 0);
    pretraining = train(env, tables, tc);
    for (NodeState& n : graph.nodes()) {
      n.q_tables = std::move(tables[n.id]);
      rt[n.id].decisions = std::max<std::uint64_t>(rt[n.id].decisions, cfg.pretrain_episodes);
    }
  }

  void on_kill(NodeId id) {
    NodeState& n = graph.node(id);
    if (!n.alive || n.is_sink) return;
    rt[id].killed = true;
    if (n.residual_energy > 0.0) {
      const double rest = n.residual_energy;
      ledger.record(id, EnergyUse::tx, rest, now);
      emit(LogKind::energy, id, 0, TrafficClass::normal, rest,
           static_cast<std::uint32_t>(EnergyUse::tx));
    }
    n.residual_energy = 0.0;
    n.alive = false;
    ledger.record_death(id, now);
    on_death(id);
  }

  void on_sample() {
    ++closure.samples;
    const MetricsReport m = acc.report();
    if (m.generated != m.delivered + m.dropped() + live.size()) ++closure.accounting_violations;
    double consumed = 0.0;
    double residual = 0.0;
    std::size_t users = 0;
    for (const NodeState& n : graph.nodes()) {
      if (n.is_sink) continue;
      consumed += ledger.consumed(n.id);
      residual += n.residual_energy;
      ++users;
    }
    const double budget = static_cast<double>(users) * cfg.initial_energy;
    const double err = std::abs(consumed + residual - budget);
    closure.worst_energy_error = std::max(closure.worst_energy_error, err);
    if (err > 1e-9 * budget) ++closure.energy_violations;
    schedule(now + opt.sample_interval, EventKind::sample);
  }

  void dispatch(const Event& e) {
    switch (e.kind) {
      case EventKind::kill: on_kill(e.node); break;
      case EventKind::tx_outcome: on_tx_outcome(e.node); break;
      case EventKind::hello_tx: on_hello(e.node); break;
      case EventKind::generate: on_generate(e.node); break;
      case EventKind::inject: {
        const Injection inj = injections.at(e.aux);
        create_packet(inj.source, inj.cls, e.aux, true);
        break;
      }
      case EventKind::rebalance: on_rebalance(); break;
      case EventKind::recluster: on_recluster(); break;
      case EventKind::sample: on_sample(); break;
    }
  }

  void run_until(double t) {
    while (!events.empty() && events.top().time <= t) {
      const Event e = events.top();
      events.pop();
      now = e.time;
      dispatch(e);
    }
    now = std::max(now, t);
  }

  void dump_tables() {
    if (opt.qtable_dump == nullptr) return;
    std::ostream& out = *opt.qtable_dump;
    out << "node,class,state,action,q\n";
    for (const NodeState& n : graph.nodes()) {
      for (TrafficClass c : kAllClasses) {
        for (const auto& e : n.q_tables[index_of(c)].entries()) {
          out << fmt::format("{},{},{},{},{:.17g}\n", n.id, to_string(c), e.state, e.action, e.value);
        }
      }
    }
  }
};

Simulation::Simulation(const SimConfig& config, Protocol protocol, SimulationOptions options)
    : impl_(std::make_unique<Impl>(config, protocol, std::move(options))) {
  if (impl_->opt.cluster_dump != nullptr) *impl_->opt.cluster_dump << "round,node_id,u1,u2,u3\n";
}

Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;

void Simulation::kill_node_at(NodeId node, double t) {
  impl_->graph.node(node);
  impl_->schedule(t, EventKind::kill, node);
}

std::uint64_t Simulation::inject_packet(NodeId source, TrafficClass cls, double t) {
  if (source == impl_->graph.sink_id()) throw std::invalid_argument("the sink does not originate packets");
  impl_->graph.node(source);
  const std::uint64_t id = impl_->next_packet++;
  impl_->injections[id] = {source, cls};
  PacketTrace pending;
  pending.id = id;
  pending.cls = cls;
  pending.source = source;
  pending.created = t;
  impl_->traces[id] = pending;
  impl_->schedule(t, EventKind::inject, source, id);
  return id;
}

void Simulation::run() {
  run_until(impl_->cfg.sim_duration);
  if (!impl_->finished) {
    impl_->finished = true;
    impl_->dump_tables();
  }
}

void Simulation::run_until(double t) { impl_->run_until(t); }
double Simulation::now() const { return impl_->now; }
const SimConfig& Simulation::config() const { return impl_->cfg; }
const NetworkGraph& Simulation::graph() const { return impl_->graph; }
const EnergyLedger& Simulation::ledger() const { return impl_->ledger; }
std::span<const LogRecord> Simulation::log() const { return impl_->log; }
const ClosureCheck& Simulation::closure() const { return impl_->closure; }
const std::vector<ClusterModel>& Simulation::clustering_rounds() const { return impl_->rounds; }
const std::optional<TrainingResult>& Simulation::pretraining() const { return impl_->pretraining; }

const PacketTrace& Simulation::trace(std::uint64_t packet) const {
  const auto it = impl_->traces.find(packet);
  if (it == impl_->traces.end()) throw std::out_of_range("packet was not injected");
  return it->second;
}

MetricsReport Simulation::report() const { return impl_->acc.report(); }

MetricsReport run_scenario(const SimConfig& config, Protocol protocol,
                           const SimulationOptions& options) {
  Simulation sim(config, protocol, options);
  sim.run();
  return sim.report();
}

}  // namespace qqmr
