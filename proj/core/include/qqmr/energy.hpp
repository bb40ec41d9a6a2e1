// First-order radio energy model and per-node energy accounting.
#pragma once

#include <cstdint>
#include <vector>

#include "qqmr/config.hpp"
#include "qqmr/node.hpp"

namespace qqmr {

struct RadioParams {
  double e_elec = 50e-9;      // J/bit
  double eps_amp = 0.0013e-12;  // J/bit/m^exponent
  double path_loss_exponent = 2.0;

  static RadioParams from(const SimConfig& config) {
    return {config.e_elec, config.eps_amp, config.path_loss_exponent};
  }
};

/// l * E_elec + l * eps_amp * d^exponent
double tx_energy(double bits, double distance, const RadioParams& radio);

/// l * E_elec
double rx_energy(double bits, const RadioParams& radio);

enum class EnergyUse : std::uint8_t { tx, rx };

enum class DebitResult : std::uint8_t { accepted, refused };

class EnergyLedger {
 public:
  struct Event {
    double time;
    NodeId node;
    EnergyUse use;
    double joules;
  };

  struct Death {
    double time;
    NodeId node;
  };

  explicit EnergyLedger(std::size_t node_count = 0, bool keep_events = false);

  void record(NodeId node, EnergyUse use, double joules, double time);
  void record_death(NodeId node, double time) { deaths_.push_back({time, node}); }

  double consumed(NodeId node) const { return consumed_.at(node); }
  std::uint64_t tx_count(NodeId node) const { return tx_count_.at(node); }
  std::uint64_t rx_count(NodeId node) const { return rx_count_.at(node); }
  double total_consumed() const;

  /// Energy of all recorded events with t0 <= time <= t1. Requires
  /// keep_events; throws std::logic_error otherwise.
  double total_consumption(double t0, double t1) const;

  const std::vector<Event>& events() const { return events_; }
  const std::vector<Death>& deaths() const { return deaths_; }

 private:
  bool keep_events_;
  std::vector<double> consumed_;
  std::vector<std::uint64_t> tx_count_;
  std::vector<std::uint64_t> rx_count_;
  std::vector<Event> events_;
  std::vector<Death> deaths_;
};

/// Takes `amount` joules from the node. An overdraw is refused: the node is
/// marked dead, its remaining energy is written off as consumed, and the
/// death is logged. The sink is never debited. Throws std::invalid_argument
/// for a negative amount.
DebitResult debit(NodeState& node, double amount, EnergyLedger& ledger, EnergyUse use,
                  double time);

}  // namespace qqmr
