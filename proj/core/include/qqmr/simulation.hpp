// Discrete-event simulation of one run: hello exchange, traffic, MAC,
// forwarding under QQMR or the greedy baseline, clustering and metrics.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qqmr/config.hpp"
#include "qqmr/energy.hpp"
#include "qqmr/metrics.hpp"
#include "qqmr/net_model.hpp"
#include "qqmr/trainer.hpp"
#include "qqmr/wfcm.hpp"

namespace qqmr {

enum class Protocol : std::uint8_t { qqmr, greedy };

std::string_view to_string(Protocol protocol);
std::optional<Protocol> parse_protocol(std::string_view text);

struct SimulationOptions {
  bool record_log = false;           // keep every LogRecord in memory
  bool keep_energy_events = false;   // per-event energy ledger
  bool generate_traffic = true;      // Poisson sources at every user
  bool check_closure = true;         // verify accounting and energy at each sample
  double sample_interval = 1.0;      // s between metric samples

  /// Custom placement. When `user_positions` is non-empty it replaces the
  /// random topology; the sink goes to `sink_position` or the area center.
  std::vector<Position> user_positions;
  std::optional<Position> sink_position;

  std::ostream* qtable_dump = nullptr;   // node,class,state,action,q at the end
  std::ostream* cluster_dump = nullptr;  // round,node_id,u1,u2,u3 per clustering
};

enum class PacketFate : std::uint8_t { in_flight, delivered, dropped };

struct PacketTrace {
  std::uint64_t id = 0;
  TrafficClass cls = TrafficClass::normal;
  NodeId source = kInvalidNode;
  double created = 0.0;
  PacketFate fate = PacketFate::in_flight;
  DropCause cause = DropCause::link;
  std::vector<NodeId> path;      // nodes that held the packet, source first
  std::uint32_t backup_hops = 0;  // hops that went over a backup next hop
  double finished = 0.0;
};

struct ClosureCheck {
  std::uint64_t samples = 0;
  std::uint64_t accounting_violations = 0;
  std::uint64_t energy_violations = 0;
  double worst_energy_error = 0.0;  // J

  bool ok() const { return accounting_violations == 0 && energy_violations == 0; }
};

class Simulation {
 public:
  Simulation(const SimConfig& config, Protocol protocol, SimulationOptions options = {});
  ~Simulation();
  Simulation(Simulation&&) noexcept;
  Simulation& operator=(Simulation&&) noexcept;

  /// Schedules an abrupt failure: the node stops transmitting, receiving and
  /// answering at time t.
  void kill_node_at(NodeId node, double t);

  /// Schedules one packet at `source` at time t. Its trace is kept.
  std::uint64_t inject_packet(NodeId source, TrafficClass cls, double t);

  /// Runs to config.sim_duration.
  void run();
  void run_until(double t);
  double now() const;

  const SimConfig& config() const;
  const NetworkGraph& graph() const;
  const EnergyLedger& ledger() const;
  std::span<const LogRecord> log() const;
  const ClosureCheck& closure() const;
  const std::vector<ClusterModel>& clustering_rounds() const;

  /// Offline warm-up on the first neighbor snapshot, when enabled.
  const std::optional<TrainingResult>& pretraining() const;

  /// Throws std::out_of_range for a packet that was not injected.
  const PacketTrace& trace(std::uint64_t packet) const;

  MetricsReport report() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

MetricsReport run_scenario(const SimConfig& config, Protocol protocol,
                           const SimulationOptions& options = {});

}  // namespace qqmr
