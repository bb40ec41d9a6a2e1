#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "qqmr/metrics.hpp"

using namespace qqmr;

namespace {

std::vector<LogRecord> synthetic_log(std::uint64_t seed, int events) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> kind(0, 5), node(1, 9), cls(0, 2), hops(1, 6), cause(0, 5);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<LogRecord> log;
  double t = 0;
  std::uint64_t packet = 0;
  for (int i = 0; i < events; ++i) {
    t += u(rng);
    LogRecord r;
    r.time = t;
    r.subject = static_cast<NodeId>(node(rng));
    r.cls = class_at(static_cast<std::size_t>(cls(rng)));
    switch (kind(rng)) {
      case 0: r.kind = LogKind::generated; r.packet = packet++; break;
      case 1: r.kind = LogKind::delivered; r.value = u(rng); r.code = hops(rng); break;
      case 2: r.kind = LogKind::dropped; r.code = cause(rng); break;
      case 3: r.kind = LogKind::data_tx; break;
      case 4: r.kind = LogKind::control_tx; r.code = 0; break;
      default: r.kind = LogKind::energy; r.value = u(rng) * 1e-3; break;
    }
    log.push_back(r);
  }
  return log;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("basic ratios") {
  std::vector<LogRecord> log;
  for (std::uint64_t i = 0; i < 10; ++i) {
    log.push_back({0.0, LogKind::generated, 1, i});
    log.push_back({1.0, LogKind::delivered, 0, i, TrafficClass::normal, 0.5, 2});
  }
  const MetricsReport m = compute_metrics(log);
  CHECK(m.pdr == 100.0);
  CHECK(*m.eed == 0.5);
  CHECK(*m.hc == 2.0);
  CHECK(m.in_flight == 0);

  const std::vector<LogRecord> single{{1.0, LogKind::generated, 3, 0},
                                      {1.25, LogKind::delivered, 0, 0, TrafficClass::normal, 0.25, 1}};
  CHECK(*compute_metrics(single).eed == 0.25);
}

TEST_CASE("empty and undelivered logs") {
  const MetricsReport empty = compute_metrics({});
  CHECK(empty.generated == 0);
  CHECK(empty.pdr == 0.0);
  CHECK_FALSE(empty.eed.has_value());
  CHECK_FALSE(empty.hc.has_value());
  const std::vector<LogRecord> lost{{0, LogKind::generated, 1, 0},
                                    {1, LogKind::dropped, 1, 0, TrafficClass::normal, 0, 3}};
  const MetricsReport m = compute_metrics(lost);
  CHECK(m.pdr == 0.0);
  CHECK_FALSE(m.eed.has_value());
  CHECK(m.drops_by(DropCause::link) == 1);
  CHECK(m.in_flight == 0);
}

TEST_CASE("50-event log matches the replay oracle") {
  const auto log = synthetic_log(50, 50);
  double gen = 0, del = 0, ctrl = 0, energy = 0, delay = 0, hops = 0;
  std::map<std::uint32_t, int> drops;
  for (const auto& r : log) {
    if (r.kind == LogKind::generated) gen += 1;
    if (r.kind == LogKind::delivered) {
      del += 1;
      delay += r.value;
      hops += r.code;
    }
    if (r.kind == LogKind::dropped) ++drops[r.code];
    if (r.kind == LogKind::control_tx) ctrl += 1;
    if (r.kind == LogKind::energy) energy += r.value;
  }
  const MetricsReport m = compute_metrics(log);
  CHECK(m.generated == gen);
  CHECK(m.delivered == del);
  CHECK(m.pdr == doctest::Approx(100 * del / gen));
  CHECK(*m.eed == doctest::Approx(delay / del));
  CHECK(*m.hc == doctest::Approx(hops / del));
  CHECK(m.ro == doctest::Approx(ctrl / gen));
  CHECK(m.ec == doctest::Approx(energy));
  for (const auto& [cause, n] : drops) CHECK(m.drops[cause] == static_cast<std::uint64_t>(n));
}

TEST_CASE("convergence tracking") {
  const std::vector<double> flat(30, 42.0);
  CHECK(track_convergence(flat) == 1);
  std::vector<double> alternating;
  for (int i = 0; i < 60; ++i) alternating.push_back(i % 2 == 0 ? 100.0 : -100.0);
  CHECK_FALSE(track_convergence(alternating).has_value());
  CHECK_FALSE(track_convergence(std::vector<double>(10, 1.0)).has_value());

  std::vector<double> ramp;
  for (int i = 0; i < 100; ++i) ramp.push_back(i < 40 ? i : 40.0);
  const auto c = track_convergence(ramp);
  REQUIRE(c.has_value());
  CHECK(*c > 1);
  CHECK(*c <= 41);
}

TEST_CASE("event log round trip") {
  const auto log = synthetic_log(9, 200);
  std::stringstream io;
  write_event_log(io, log);
  const auto back = read_event_log(io);
  CHECK(back == log);
  std::istringstream bad("time,kind,subject,detail\n1.0,teleport,3,packet=0\n");
  CHECK_THROWS_AS(read_event_log(bad), std::runtime_error);
}

}
