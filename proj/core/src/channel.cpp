#include "qqmr/channel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

namespace qqmr {

ChannelParams ChannelParams::from(const SimConfig& c) {
  ChannelParams p;
  p.bit_rate = c.bit_rate;
  p.per_bit_error_prob = c.per_bit_error_prob;
  p.collision_kappa = c.collision_kappa;
  p.collision_cap = c.collision_cap;
  p.capture_exponent = c.capture_exponent;
  p.contention_slot = c.contention_slot;
  p.rts_kappa = c.rts_kappa;
  p.ack_loss_prob = c.ack_loss_prob;
  return p;
}

double mean_contention_delay(const ChannelParams& params, std::uint32_t backlogged) {
  return params.contention_slot * (1.0 + backlogged);
}

double collision_probability(const ChannelParams& params, std::uint32_t backlogged,
                             double distance, double range) {
  const double reach = range > 0.0 ? std::pow(distance / range, params.capture_exponent) : 1.0;
  return std::min(params.collision_cap, params.collision_kappa * backlogged * reach);
}

double rts_retry_probability(const ChannelParams& params, std::uint32_t backlogged) {
  return std::min(params.collision_cap, params.rts_kappa * backlogged);
}

double clean_frame_probability(const ChannelParams& params, std::uint64_t bits) {
  return std::pow(1.0 - params.per_bit_error_prob, static_cast<double>(bits));
}

double ChannelModel::sample_contention_delay(std::uint32_t backlogged) {
  const double mean = mean_contention_delay(params_, backlogged);
  if (mean <= 0.0) return 0.0;
  return std::exponential_distribution<double>(1.0 / mean)(rng_);
}

bool ChannelModel::sample_collision(std::uint32_t backlogged, double distance, double range) {
  return sample_bernoulli(collision_probability(params_, backlogged, distance, range));
}

std::uint32_t ChannelModel::sample_rts_attempts(std::uint32_t backlogged) {
  const double p = rts_retry_probability(params_, backlogged);
  if (p <= 0.0) return 1;
  return 1 + std::geometric_distribution<std::uint32_t>(1.0 - p)(rng_);
}

std::uint64_t ChannelModel::sample_bit_flips(std::uint64_t bits) {
  if (params_.per_bit_error_prob <= 0.0 || bits == 0) return 0;
  return std::binomial_distribution<std::uint64_t>(bits, params_.per_bit_error_prob)(rng_);
}

bool ChannelModel::sample_ack_loss() { return sample_bernoulli(params_.ack_loss_prob); }

bool ChannelModel::sample_bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return std::bernoulli_distribution(p)(rng_);
}

void ChannelModel::corrupt(std::vector<std::uint8_t>& frame, std::uint64_t flips) {
  const std::uint64_t bits = static_cast<std::uint64_t>(frame.size()) * 8;
  flips = std::min(flips, bits);
  std::unordered_set<std::uint64_t> chosen;
  std::uniform_int_distribution<std::uint64_t> pick(0, bits - 1);
  while (chosen.size() < flips) {
    const std::uint64_t bit = pick(rng_);
    if (!chosen.insert(bit).second) continue;
    frame[bit / 8] ^= static_cast<std::uint8_t>(0x80u >> (bit % 8));
  }
}

}  // namespace qqmr
