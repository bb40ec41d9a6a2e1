// Run event log, metric computation and convergence tracking.
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qqmr/types.hpp"

namespace qqmr {

enum class LogKind : std::uint8_t {
  generated,   // subject = source
  delivered,   // value = end-to-end delay, code = hop count
  dropped,     // subject = node holding the packet, code = DropCause
  data_tx,     // one data frame on the air, subject = sender
  control_tx,  // code = ControlKind
  energy,      // value = joules, code = EnergyUse
  reward,      // value = cumulative reward of one packet, subject = source
  death,       // node ran out of energy
};

enum class DropCause : std::uint8_t { overflow, no_route, corrupt, link, ttl, energy };
inline constexpr std::size_t kDropCauseCount = 6;

enum class ControlKind : std::uint8_t { hello, ack, rts, cts, membership };

std::string_view to_string(LogKind kind);
std::string_view to_string(DropCause cause);
std::string_view to_string(ControlKind kind);

struct LogRecord {
  double time = 0.0;
  LogKind kind = LogKind::generated;
  NodeId subject = kInvalidNode;
  std::uint64_t packet = 0;
  TrafficClass cls = TrafficClass::normal;
  double value = 0.0;
  std::uint32_t code = 0;

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

struct ClassCounts {
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
};

struct MetricsReport {
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::array<std::uint64_t, kDropCauseCount> drops{};
  std::uint64_t in_flight = 0;  // generated - delivered - dropped
  std::uint64_t data_transmissions = 0;
  std::uint64_t control_packets = 0;
  std::uint64_t deaths = 0;
  std::array<ClassCounts, kClassCount> per_class{};

  double pdr = 0.0;             // percent; 0 when nothing was generated
  std::optional<double> eed;    // s, absent when nothing was delivered
  double ro = 0.0;              // control packets / data packets sent
  double ec = 0.0;              // J
  std::optional<double> hc;     // absent when nothing was delivered

  std::vector<double> episode_rewards;
  std::optional<std::size_t> converged_episode;

  std::uint64_t dropped() const;
  std::uint64_t drops_by(DropCause c) const { return drops[static_cast<std::size_t>(c)]; }
};

/// Streams records into running totals.
class MetricsAccumulator {
 public:
  void consume(const LogRecord& record);
  MetricsReport report() const;

 private:
  MetricsReport totals_;
  double delay_sum_ = 0.0;
  double hop_sum_ = 0.0;
};

MetricsReport compute_metrics(std::span<const LogRecord> log);

/// First (1-based) episode t such that every window of `window` episodes
/// starting at or after t has stddev <= tolerance * |mean|. Empty when fewer
/// than `window` episodes exist or the last window fails.
std::optional<std::size_t> track_convergence(std::span<const double> rewards,
                                             std::size_t window = 20, double tolerance = 0.05);

/// Line format: time,kind,subject,detail where detail is
/// "packet=<n> class=<name> value=<v> code=<c>".
void write_event_log(std::ostream& out, std::span<const LogRecord> log);
std::vector<LogRecord> read_event_log(std::istream& in);

}  // namespace qqmr
