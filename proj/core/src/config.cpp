#include "qqmr/config.hpp"

#include <cmath>
#include <numeric>

namespace qqmr {

namespace {

void require(bool ok, const char* key, const std::string& message) {
  if (!ok) throw ConfigError(key, message);
}

bool probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void SimConfig::validate() const {
  require(node_count >= 2, "node_count", "need at least 2 WBAN users");
  require(area_side > 0.0, "area_side", "must be > 0");
  require(comm_range > 0.0, "comm_range", "must be > 0");
  require(initial_energy > 0.0, "initial_energy", "must be > 0");

  require(buffer_capacity >= 3, "buffer_capacity", "must hold at least one packet per queue");
  require(packet_size > 0, "packet_size", "must be > 0");
  require(send_rate > 0.0, "send_rate", "must be > 0");
  for (double f : traffic_mix) require(f >= 0.0, "traffic_mix", "fractions must be >= 0");
  const double mix = std::accumulate(traffic_mix.begin(), traffic_mix.end(), 0.0);
  require(std::abs(mix - 1.0) <= 1e-9, "traffic_mix", "fractions must sum to 1");
  require(sim_duration >= 0.0, "sim_duration", "must be >= 0");
  require(warmup >= 0.0, "warmup", "must be >= 0");

  require(alpha > 0.0 && alpha <= 1.0, "alpha", "must lie in (0, 1]");
  require(probability(gamma), "gamma", "must lie in [0, 1]");
  require(probability(epsilon_start), "epsilon_start", "must lie in [0, 1]");
  require(epsilon_decay > 0.0 && epsilon_decay <= 1.0, "epsilon_decay", "must lie in (0, 1]");
  require(probability(epsilon_floor), "epsilon_floor", "must lie in [0, 1]");
  require(probability(membership_threshold), "membership_threshold", "must lie in [0, 1]");
  require(max_hops > 0, "max_hops", "must be > 0");

  require(hello_interval > 0.0, "hello_interval", "must be > 0");
  require(hello_expiry_factor >= 1.0, "hello_expiry_factor", "must be >= 1");
  require(hello_bytes > 0, "hello_bytes", "must be > 0");

  require(queue_update_interval > 0.0, "queue_update_interval", "must be > 0");
  require(ell1 >= 0.0 && ell2 >= 0.0, "ell1", "ell1 and ell2 must be >= 0");
  require(std::abs(ell1 + ell2 - 1.0) <= 1e-9, "ell1", "ell1 + ell2 must equal 1");
  require(min_queue_share > 0.0 && min_queue_share * 3.0 <= 1.0, "min_queue_share",
          "must lie in (0, 1/3]");
  require(max_queue_share >= min_queue_share && max_queue_share <= 1.0, "max_queue_share",
          "must lie in [min_queue_share, 1]");
  require(min_queue_capacity() * 3 <= buffer_capacity &&
              max_queue_capacity() * 3 >= buffer_capacity && min_queue_capacity() >= 1,
          "buffer_capacity", "queue bounds cannot partition the buffer");
  require(rate_smoothing > 0.0 && rate_smoothing <= 1.0, "rate_smoothing", "must lie in (0, 1]");

  require(path_loss_exponent >= 2.0 && path_loss_exponent <= 4.0, "path_loss_exponent",
          "must lie in [2, 4]");
  require(e_elec >= 0.0, "e_elec", "must be >= 0");
  require(eps_amp >= 0.0, "eps_amp", "must be >= 0");

  require(bit_rate > 0.0, "bit_rate", "must be > 0");
  require(probability(per_bit_error_prob), "per_bit_error_prob", "must lie in [0, 1]");
  require(collision_kappa >= 0.0, "collision_kappa", "must be >= 0");
  require(probability(collision_cap), "collision_cap", "must lie in [0, 1]");
  require(capture_exponent >= 0.0, "capture_exponent", "must be >= 0");
  require(contention_slot >= 0.0, "contention_slot", "must be >= 0");
  require(rts_kappa >= 0.0, "rts_kappa", "must be >= 0");
  require(ack_timeout > 0.0, "ack_timeout", "must be > 0");
  require(ack_turnaround >= 0.0 && ack_turnaround < ack_timeout, "ack_turnaround",
          "must lie in [0, ack_timeout)");
  require(probability(ack_loss_prob), "ack_loss_prob", "must lie in [0, 1]");
  require(ack_bytes > 0, "ack_bytes", "must be > 0");
  require(rts_bytes > 0, "rts_bytes", "must be > 0");
  require(cts_bytes > 0, "cts_bytes", "must be > 0");

  require(fuzziness > 1.0, "fuzziness", "must be > 1");
  require(max_iter > 0, "max_iter", "must be > 0");
  require(tol > 0.0, "tol", "must be > 0");
  require(recluster_interval > 0.0, "recluster_interval", "must be > 0");
  require(learn_min >= 0.0 && learn_min <= learn_max && learn_max <= 1.0, "learn_min",
          "need 0 <= learn_min <= learn_max <= 1");
}

std::uint32_t SimConfig::min_queue_capacity() const {
  return static_cast<std::uint32_t>(std::ceil(min_queue_share * buffer_capacity - 1e-9));
}

std::uint32_t SimConfig::max_queue_capacity() const {
  return static_cast<std::uint32_t>(std::floor(max_queue_share * buffer_capacity + 1e-9));
}

}  // namespace qqmr
