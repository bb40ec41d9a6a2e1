// Packet classification and the adaptive three-queue node buffer.
#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>

#include "qqmr/types.hpp"

namespace qqmr {

/// Two-bit on-air class code.
enum class PacketType : std::uint8_t {
  emergency = 0b00,
  error_sensitive = 0b01,
  normal = 0b10,
};

/// What the sensed data is. Drives classification.
enum class PayloadKind : std::uint8_t {
  cardiac_arrest_alert,
  arrhythmia_alert,
  heart_rate_drop_alert,
  seizure_alert,
  medical_image,
  diagnostic_signal,
  temperature,
  humidity,
  status_report,
};

PacketType classify(PayloadKind kind);

constexpr TrafficClass class_of(PacketType t) {
  switch (t) {
    case PacketType::emergency: return TrafficClass::emergency;
    case PacketType::error_sensitive: return TrafficClass::error_sensitive;
    case PacketType::normal: return TrafficClass::normal;
  }
  return TrafficClass::normal;
}

constexpr PacketType packet_type_of(TrafficClass c) {
  switch (c) {
    case TrafficClass::emergency: return PacketType::emergency;
    case TrafficClass::error_sensitive: return PacketType::error_sensitive;
    case TrafficClass::normal: return PacketType::normal;
  }
  return PacketType::normal;
}

using QueueVector = std::array<double, kClassCount>;
using QueueCounts = std::array<std::uint32_t, kClassCount>;

/// B(t + dt) = B(t) + V_in - V_out, clamped to [0, capacity].
double occupancy_step(double occupancy, double volume_in, double volume_out, double capacity);

/// Free space F = C - sum_p B_p.
double free_space(double total_capacity, const QueueVector& occupancy);

/// Unnormalized capacity proposal
///   C~_p = C_p + F [ l1 (B_p/C_p) / sum_j (B_j/C_j) + l2 lambda_p / sum_j lambda_j ].
/// A ratio term whose denominator is zero contributes nothing. Returns the
/// current capacities unchanged when both terms are undefined.
QueueVector propose_capacities(const QueueVector& capacity, const QueueVector& occupancy,
                               const QueueVector& arrival_rate, double total_capacity,
                               double ell1, double ell2);

/// C_p = C~_p / sum_j C~_j * C.
QueueVector normalize_capacities(const QueueVector& proposed, double total_capacity);

/// Places `target` into [lower_p, upper_p] while keeping the sum equal to
/// `total_capacity`. Targets already inside their bounds are returned as-is.
/// Requires sum(lower) <= total <= sum(upper).
QueueVector clamp_capacities(const QueueVector& target, const QueueVector& lower,
                             const QueueVector& upper, double total_capacity);

/// Largest-remainder rounding: integers within one of the reals, summing to
/// `total` exactly.
QueueCounts round_capacities(const QueueVector& capacity, std::uint32_t total);

/// Full rebalance step (proposal, normalization, bounded projection).
QueueVector update_queue_capacities(const QueueVector& capacity, const QueueVector& occupancy,
                                    const QueueVector& arrival_rate, double total_capacity,
                                    double ell1, double ell2, double min_capacity,
                                    double max_capacity);

enum class QueueDiscipline : std::uint8_t {
  adaptive_priority,  // three class queues, strict priority, adaptive capacities
  shared_fifo,        // one drop-tail FIFO of the whole capacity
};

struct QueueSettings {
  std::uint32_t total_capacity = 100;
  double ell1 = 0.5;
  double ell2 = 0.5;
  std::uint32_t min_capacity = 10;
  std::uint32_t max_capacity = 80;
  double rate_smoothing = 0.5;
  QueueDiscipline discipline = QueueDiscipline::adaptive_priority;
};

enum class EnqueueResult : std::uint8_t { accepted, dropped_overflow };

/// Node buffer. Stores opaque packet handles; the owner keeps packet bodies.
class MultiQueueBuffer {
 public:
  using Handle = std::uint64_t;

  struct Item {
    Handle handle;
    TrafficClass cls;
    double enqueued_at;
  };

  explicit MultiQueueBuffer(QueueSettings settings = {});

  EnqueueResult enqueue(TrafficClass cls, Handle handle, double now = 0.0);

  /// Head of the highest-priority non-empty queue (FIFO within a queue).
  std::optional<Item> dequeue_next();

  bool is_full(TrafficClass cls) const;
  bool empty() const;
  std::uint32_t size() const;

  std::uint32_t occupancy(TrafficClass cls) const { return occupancy_[index_of(cls)]; }
  std::uint32_t capacity(TrafficClass cls) const { return capacity_[index_of(cls)]; }
  double real_capacity(TrafficClass cls) const { return real_capacity_[index_of(cls)]; }
  double arrival_rate(TrafficClass cls) const { return arrival_rate_[index_of(cls)]; }
  double departure_rate(TrafficClass cls) const { return departure_rate_[index_of(cls)]; }
  std::uint32_t total_capacity() const { return settings_.total_capacity; }

  /// F(t) in packets.
  std::uint32_t free_space() const;

  /// Closes the current measurement window of length `dt`: folds the window's
  /// arrival/departure counts into the rate estimators.
  void close_window(double dt);

  /// Recomputes class capacities from current occupancy and arrival rates.
  /// No-op for the shared FIFO discipline.
  void rebalance();

  /// Removes every stored item (node death).
  std::deque<Item> drain();

  const QueueSettings& settings() const { return settings_; }

 private:
  QueueSettings settings_;
  std::array<std::deque<Item>, kClassCount> queues_;
  std::deque<Item> fifo_;
  QueueCounts occupancy_{};
  QueueCounts capacity_{};
  QueueVector real_capacity_{};
  QueueVector arrival_rate_{};
  QueueVector departure_rate_{};
  QueueCounts window_arrivals_{};
  QueueCounts window_departures_{};
};

}  // namespace qqmr
