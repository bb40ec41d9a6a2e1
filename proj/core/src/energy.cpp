#include "qqmr/energy.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qqmr {

double tx_energy(double bits, double distance, const RadioParams& radio) {
  return bits * radio.e_elec + bits * radio.eps_amp * std::pow(distance, radio.path_loss_exponent);
}

double rx_energy(double bits, const RadioParams& radio) { return bits * radio.e_elec; }

EnergyLedger::EnergyLedger(std::size_t node_count, bool keep_events)
    : keep_events_(keep_events),
      consumed_(node_count, 0.0),
      tx_count_(node_count, 0),
      rx_count_(node_count, 0) {}

void EnergyLedger::record(NodeId node, EnergyUse use, double joules, double time) {
  consumed_.at(node) += joules;
  (use == EnergyUse::tx ? tx_count_ : rx_count_).at(node) += 1;
  if (keep_events_) events_.push_back({time, node, use, joules});
}

double EnergyLedger::total_consumed() const {
  return std::accumulate(consumed_.begin(), consumed_.end(), 0.0);
}

double EnergyLedger::total_consumption(double t0, double t1) const {
  if (!keep_events_) throw std::logic_error("energy ledger was built without event history");
  double sum = 0.0;
  for (const Event& e : events_) {
    if (e.time >= t0 && e.time <= t1) sum += e.joules;
  }
  return sum;
}

DebitResult debit(NodeState& node, double amount, EnergyLedger& ledger, EnergyUse use,
                  double time) {
  if (amount < 0.0) throw std::invalid_argument("negative energy debit");
  if (node.is_sink) return DebitResult::accepted;
  if (!node.alive) return DebitResult::refused;
  if (amount > node.residual_energy) {
    const double rest = node.residual_energy;
    node.residual_energy = 0.0;
    node.alive = false;
    if (rest > 0.0) ledger.record(node.id, use, rest, time);
    ledger.record_death(node.id, time);
    return DebitResult::refused;
  }
  node.residual_energy -= amount;
  ledger.record(node.id, use, amount, time);
  if (node.residual_energy <= 0.0) {
    node.residual_energy = 0.0;
    node.alive = false;
    ledger.record_death(node.id, time);
  }
  return DebitResult::accepted;
}

}  // namespace qqmr
