// Parametric medium-access and loss model standing in for a full 802.11
// MAC/PHY.
#pragma once

#include <cstdint>
#include <vector>

#include "qqmr/config.hpp"
#include "qqmr/rng.hpp"

namespace qqmr {

struct ChannelParams {
  double bit_rate = 512e3;
  double per_bit_error_prob = 1e-5;
  double collision_kappa = 0.01;
  double collision_cap = 0.8;
  double capture_exponent = 2.0;
  double contention_slot = 1e-3;
  double rts_kappa = 0.01;
  double ack_loss_prob = 0.0;

  static ChannelParams from(const SimConfig& config);
};

/// Mean access delay: slot * (1 + backlogged contenders).
double mean_contention_delay(const ChannelParams& params, std::uint32_t backlogged);

/// min(cap, kappa * backlogged * (distance / range)^capture_exponent)
double collision_probability(const ChannelParams& params, std::uint32_t backlogged,
                             double distance, double range);

/// Probability that an RTS goes unanswered and is retried.
double rts_retry_probability(const ChannelParams& params, std::uint32_t backlogged);

/// Probability that a frame of `bits` arrives without a single bit error.
double clean_frame_probability(const ChannelParams& params, std::uint64_t bits);

class ChannelModel {
 public:
  ChannelModel(ChannelParams params, Rng rng) : params_(params), rng_(std::move(rng)) {}

  const ChannelParams& params() const { return params_; }

  /// Exponential with mean_contention_delay.
  double sample_contention_delay(std::uint32_t backlogged);

  bool sample_collision(std::uint32_t backlogged, double distance, double range);

  /// RTS transmissions needed before the CTS: 1 + geometric retries.
  std::uint32_t sample_rts_attempts(std::uint32_t backlogged);

  /// Number of flipped bits in a frame of `bits` (binomial).
  std::uint64_t sample_bit_flips(std::uint64_t bits);

  bool sample_ack_loss();

  bool sample_bernoulli(double p);

  /// Flips `flips` distinct random bits of `frame` in place.
  void corrupt(std::vector<std::uint8_t>& frame, std::uint64_t flips);

 private:
  ChannelParams params_;
  Rng rng_;
};

}  // namespace qqmr
