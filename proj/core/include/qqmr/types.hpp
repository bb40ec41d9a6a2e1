// Shared vocabulary types for the QQMR routing library.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace qqmr {

using NodeId = std::uint32_t;

inline constexpr NodeId kInvalidNode = 0xFFFFFFFFu;

/// Planar coordinates in meters.
struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

inline double euclidean_distance(Position a, Position b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// QoS class of a data packet. The numeric value doubles as the policy /
/// queue / cluster index (p - 1).
enum class TrafficClass : std::uint8_t {
  emergency = 0,
  error_sensitive = 1,
  normal = 2,
};

inline constexpr std::size_t kClassCount = 3;

inline constexpr std::array<TrafficClass, kClassCount> kAllClasses{
    TrafficClass::emergency, TrafficClass::error_sensitive, TrafficClass::normal};

constexpr std::size_t index_of(TrafficClass c) { return static_cast<std::size_t>(c); }

constexpr TrafficClass class_at(std::size_t i) { return static_cast<TrafficClass>(i); }

constexpr std::string_view to_string(TrafficClass c) {
  switch (c) {
    case TrafficClass::emergency: return "emergency";
    case TrafficClass::error_sensitive: return "error_sensitive";
    case TrafficClass::normal: return "normal";
  }
  return "unknown";
}

/// Fuzzy membership degrees of one node in the three QoS clusters.
using Memberships = std::array<double, kClassCount>;

inline constexpr Memberships kUniformMemberships{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

}  // namespace qqmr
