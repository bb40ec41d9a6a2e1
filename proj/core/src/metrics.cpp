#include "qqmr/metrics.hpp"

#include <cmath>
#include <fmt/format.h>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qqmr {

std::string_view to_string(LogKind kind) {
  switch (kind) {
    case LogKind::generated: return "generated";
    case LogKind::delivered: return "delivered";
    case LogKind::dropped: return "dropped";
    case LogKind::data_tx: return "data_tx";
    case LogKind::control_tx: return "control_tx";
    case LogKind::energy: return "energy";
    case LogKind::reward: return "reward";
    case LogKind::death: return "death";
  }
  return "unknown";
}

std::string_view to_string(DropCause cause) {
  switch (cause) {
    case DropCause::overflow: return "overflow";
    case DropCause::no_route: return "no_route";
    case DropCause::corrupt: return "corrupt";
    case DropCause::link: return "link";
    case DropCause::ttl: return "ttl";
    case DropCause::energy: return "energy";
  }
  return "unknown";
}

std::string_view to_string(ControlKind kind) {
  switch (kind) {
    case ControlKind::hello: return "hello";
    case ControlKind::ack: return "ack";
    case ControlKind::rts: return "rts";
    case ControlKind::cts: return "cts";
    case ControlKind::membership: return "membership";
  }
  return "unknown";
}

std::uint64_t MetricsReport::dropped() const {
  return std::accumulate(drops.begin(), drops.end(), std::uint64_t{0});
}

void MetricsAccumulator::consume(const LogRecord& r) {
  switch (r.kind) {
    case LogKind::generated:
      ++totals_.generated;
      ++totals_.per_class[index_of(r.cls)].generated;
      break;
    case LogKind::delivered:
      ++totals_.delivered;
      ++totals_.per_class[index_of(r.cls)].delivered;
      delay_sum_ += r.value;
      hop_sum_ += r.code;
      break;
    case LogKind::dropped:
      ++totals_.drops.at(r.code);
      break;
    case LogKind::data_tx:
      ++totals_.data_transmissions;
      break;
    case LogKind::control_tx:
      ++totals_.control_packets;
      break;
    case LogKind::energy:
      totals_.ec += r.value;
      break;
    case LogKind::reward:
      totals_.episode_rewards.push_back(r.value);
      break;
    case LogKind::death:
      ++totals_.deaths;
      break;
  }
}

MetricsReport MetricsAccumulator::report() const {
  MetricsReport out = totals_;
  const std::uint64_t finished = out.delivered + out.dropped();
  out.in_flight = out.generated >= finished ? out.generated - finished : 0;
  if (out.generated > 0) {
    out.pdr = 100.0 * static_cast<double>(out.delivered) / static_cast<double>(out.generated);
    out.ro = static_cast<double>(out.control_packets) / static_cast<double>(out.generated);
  }
  if (out.delivered > 0) {
    out.eed = delay_sum_ / static_cast<double>(out.delivered);
    out.hc = hop_sum_ / static_cast<double>(out.delivered);
  }
  out.converged_episode = track_convergence(out.episode_rewards);
  return out;
}

MetricsReport compute_metrics(std::span<const LogRecord> log) {
  MetricsAccumulator acc;
  for (const auto& r : log) acc.consume(r);
  return acc.report();
}

std::optional<std::size_t> track_convergence(std::span<const double> rewards, std::size_t window,
                                             double tolerance) {
  if (window == 0 || rewards.size() < window) return std::nullopt;
  const std::size_t windows = rewards.size() - window + 1;
  const double n = static_cast<double>(window);
  std::vector<bool> stable(windows);
  for (std::size_t start = 0; start < windows; ++start) {
    const auto slice = rewards.subspan(start, window);
    const double mean = std::accumulate(slice.begin(), slice.end(), 0.0) / n;
    double var = 0.0;
    for (double r : slice) var += (r - mean) * (r - mean);
    const double sd = std::sqrt(var / n);
    stable[start] = sd == 0.0 || sd < tolerance * std::abs(mean);
  }
  if (!stable.back()) return std::nullopt;
  std::size_t first = windows - 1;
  while (first > 0 && stable[first - 1]) --first;
  return first + 1;
}

void write_event_log(std::ostream& out, std::span<const LogRecord> log) {
  out << "time,kind,subject,detail\n";
  for (const auto& r : log) {
    out << fmt::format("{:.17g},{},{},packet={} class={} value={:.17g} code={}\n", r.time,
                       to_string(r.kind), r.subject, r.packet, to_string(r.cls), r.value, r.code);
  }
}

namespace {

LogKind parse_kind(std::string_view text) {
  for (int k = 0; k <= static_cast<int>(LogKind::death); ++k) {
    if (to_string(static_cast<LogKind>(k)) == text) return static_cast<LogKind>(k);
  }
  throw std::runtime_error("unknown log kind: " + std::string(text));
}

TrafficClass parse_class(std::string_view text) {
  for (TrafficClass c : kAllClasses) {
    if (to_string(c) == text) return c;
  }
  throw std::runtime_error("unknown traffic class: " + std::string(text));
}

}  // namespace

std::vector<LogRecord> read_event_log(std::istream& in) {
  std::vector<LogRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || (line_no == 1 && line.rfind("time,", 0) == 0)) continue;
    std::istringstream fields(line);
    std::string time, kind, subject, detail;
    if (!std::getline(fields, time, ',') || !std::getline(fields, kind, ',') ||
        !std::getline(fields, subject, ',') || !std::getline(fields, detail)) {
      throw std::runtime_error("malformed event log line " + std::to_string(line_no));
    }
    LogRecord r;
    r.time = std::stod(time);
    r.kind = parse_kind(kind);
    r.subject = static_cast<NodeId>(std::stoul(subject));
    std::istringstream tokens(detail);
    std::string token;
    while (tokens >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) throw std::runtime_error("bad detail token on line " + std::to_string(line_no));
      const std::string key = token.substr(0, eq);
      const std::string value = token.substr(eq + 1);
      if (key == "packet") r.packet = std::stoull(value);
      else if (key == "class") r.cls = parse_class(value);
      else if (key == "value") r.value = std::stod(value);
      else if (key == "code") r.code = static_cast<std::uint32_t>(std::stoul(value));
      else throw std::runtime_error("unknown detail key on line " + std::to_string(line_no));
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace qqmr
