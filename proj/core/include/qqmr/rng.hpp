// Seed derivation for independent random streams.
#pragma once

#include <cstdint>
#include <random>

namespace qqmr {

using Rng = std::mt19937_64;

/// Streams drawn from one run seed. Each consumer gets its own generator so
/// that adding draws in one place never shifts another.
enum class Stream : std::uint64_t {
  topology = 1,
  traffic = 2,
  channel = 3,
  routing = 4,
  clustering = 5,
  training = 6,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, Stream stream, std::uint64_t sub = 0) {
  return splitmix64(splitmix64(base ^ splitmix64(static_cast<std::uint64_t>(stream))) + sub);
}

inline Rng make_rng(std::uint64_t base, Stream stream, std::uint64_t sub = 0) {
  return Rng{derive_seed(base, stream, sub)};
}

}  // namespace qqmr
