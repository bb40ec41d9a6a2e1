#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qqmr/queues.hpp"

using namespace qqmr;

namespace {

double sum(const QueueVector& v) { return v[0] + v[1] + v[2]; }

}  // namespace

TEST_SUITE("queues") {

TEST_CASE("classification follows the payload kind") {
  CHECK(classify(PayloadKind::cardiac_arrest_alert) == PacketType::emergency);
  CHECK(classify(PayloadKind::seizure_alert) == PacketType::emergency);
  CHECK(classify(PayloadKind::medical_image) == PacketType::error_sensitive);
  CHECK(classify(PayloadKind::diagnostic_signal) == PacketType::error_sensitive);
  CHECK(classify(PayloadKind::temperature) == PacketType::normal);
  CHECK(static_cast<int>(PacketType::emergency) == 0b00);
  CHECK(static_cast<int>(PacketType::error_sensitive) == 0b01);
  CHECK(static_cast<int>(PacketType::normal) == 0b10);
  for (TrafficClass c : kAllClasses) CHECK(class_of(packet_type_of(c)) == c);
}

TEST_CASE("occupancy step counts and clamps") {
  CHECK(occupancy_step(5, 0, 0, 10) == 5);
  CHECK(occupancy_step(5, 3, 2, 10) == 6);
  CHECK(occupancy_step(9, 5, 0, 10) == 10);
  CHECK(occupancy_step(1, 0, 4, 10) == 0);

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> in(0, 4), out(0, 4);
  double b = 0.0;
  double replay = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int vi = in(rng);
    const int vo = out(rng);
    b = occupancy_step(b, vi, vo, 25);
    replay = std::min(25.0, std::max(0.0, replay + vi - vo));
    CHECK(b == replay);
    CHECK(b >= 0.0);
    CHECK(b <= 25.0);
  }
}

TEST_CASE("worked rebalance example") {
  const QueueVector c{40, 30, 30}, b{40, 10, 5}, lambda{2, 1, 1};
  // F = 45; ratios 1, 1/3, 1/6 sum 1.5; rates 0.5, 0.25, 0.25
  const QueueVector proposed = propose_capacities(c, b, lambda, 100, 0.5, 0.5);
  CHECK(proposed[0] == doctest::Approx(66.25).epsilon(1e-15));
  CHECK(proposed[1] == doctest::Approx(40.625).epsilon(1e-15));
  CHECK(proposed[2] == doctest::Approx(38.125).epsilon(1e-15));
  const QueueVector full = update_queue_capacities(c, b, lambda, 100, 0.5, 0.5, 10, 80);
  CHECK(std::abs(full[0] - 6625.0 / 145.0) < 1e-9);
  CHECK(std::abs(full[1] - 4062.5 / 145.0) < 1e-9);
  CHECK(std::abs(full[2] - 3812.5 / 145.0) < 1e-9);
  CHECK(round_capacities(full, 100) == QueueCounts{46, 28, 26});
}

TEST_CASE("no free space leaves equal capacities unchanged") {
  const QueueVector c{30, 30, 40};
  const QueueVector b{30, 30, 40};
  const QueueVector next = update_queue_capacities(c, b, {1, 2, 3}, 100, 0.5, 0.5, 10, 80);
  for (int p = 0; p < 3; ++p) CHECK(next[p] == doctest::Approx(c[p]).epsilon(1e-12));
}

TEST_CASE("undefined ratios leave capacities unchanged") {
  const QueueVector c{50, 30, 20};
  CHECK(propose_capacities(c, {0, 0, 0}, {0, 0, 0}, 100, 0.5, 0.5) == c);
}

TEST_CASE("clamp projection keeps bounds and sum") {
  const QueueVector lo{10, 10, 10}, hi{80, 80, 80};
  const QueueVector v = clamp_capacities({95, 3, 2}, lo, hi, 100);
  CHECK(v[0] <= 80.0);
  CHECK(v[1] >= 10.0);
  CHECK(v[2] >= 10.0);
  CHECK(sum(v) == doctest::Approx(100.0).epsilon(1e-12));
  const QueueVector inside{30, 30, 40};
  CHECK(clamp_capacities(inside, lo, hi, 100) == inside);
  CHECK_THROWS_AS(clamp_capacities(inside, {50, 50, 50}, hi, 100), std::invalid_argument);
}

TEST_CASE("largest-remainder rounding") {
  CHECK(round_capacities({33.4, 33.3, 33.3}, 100) == QueueCounts{34, 33, 33});
  CHECK(round_capacities({45.69, 28.02, 26.29}, 100) == QueueCounts{46, 28, 26});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    QueueVector x{u(rng), u(rng), u(rng)};
    const double s = sum(x);
    for (auto& v : x) v = v / s * 100.0;
    const QueueCounts r = round_capacities(x, 100);
    CHECK(r[0] + r[1] + r[2] == 100);
    for (int p = 0; p < 3; ++p) CHECK(std::abs(r[p] - x[p]) < 1.0);
  }
}

TEST_CASE("enqueue drops exactly the overflow") {
  QueueSettings s;
  MultiQueueBuffer buf(s);
  const std::uint32_t cap = buf.capacity(TrafficClass::normal);
  CHECK(buf.enqueue(TrafficClass::normal, 0) == EnqueueResult::accepted);
  std::uint32_t drops = 0;
  const std::uint32_t k = 7;
  for (std::uint32_t i = 1; i < cap + k; ++i) {
    if (buf.enqueue(TrafficClass::normal, i) == EnqueueResult::dropped_overflow) ++drops;
  }
  CHECK(drops == k);
  CHECK(buf.is_full(TrafficClass::normal));
  CHECK(buf.occupancy(TrafficClass::normal) == cap);
  CHECK(buf.enqueue(TrafficClass::normal, 999) == EnqueueResult::dropped_overflow);
  CHECK(buf.enqueue(TrafficClass::emergency, 1000) == EnqueueResult::accepted);
  CHECK(buf.free_space() == 100 - cap - 1);
}

TEST_CASE("strict priority, FIFO within a class") {
  MultiQueueBuffer buf;
  CHECK_FALSE(buf.dequeue_next().has_value());
  buf.enqueue(TrafficClass::normal, 1);
  buf.enqueue(TrafficClass::emergency, 2);
  CHECK(buf.dequeue_next()->handle == 2);

  MultiQueueBuffer replay;
  oracle::PriorityFifo ref;
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> lane(0, 2), coin(0, 2);
  std::uint64_t next = 0;
  for (int step = 0; step < 5000; ++step) {
    if (coin(rng) != 0) {
      const int l = lane(rng);
      if (replay.enqueue(class_at(l), next) == EnqueueResult::accepted) ref.push(l, next);
      ++next;
    } else {
      const auto got = replay.dequeue_next();
      const auto want = ref.pop();
      REQUIRE(got.has_value() == want.has_value());
      if (got) {
        CHECK(got->handle == want->second);
        CHECK(index_of(got->cls) == static_cast<std::size_t>(want->first));
        for (std::size_t higher = 0; higher < index_of(got->cls); ++higher) {
          CHECK(replay.occupancy(class_at(higher)) == 0);
        }
      }
    }
  }
}

TEST_CASE("buffer rebalance follows load and respects bounds") {
  MultiQueueBuffer buf;
  for (int i = 0; i < 30; ++i) buf.enqueue(TrafficClass::emergency, i);
  buf.close_window(1.0);
  CHECK(buf.arrival_rate(TrafficClass::emergency) == doctest::Approx(15.0));
  buf.rebalance();
  CHECK(buf.capacity(TrafficClass::emergency) > 34);
  std::uint32_t total = 0;
  for (TrafficClass c : kAllClasses) {
    total += buf.capacity(c);
    CHECK(buf.capacity(c) >= 10);
    CHECK(buf.capacity(c) <= 80);
    CHECK(buf.occupancy(c) <= buf.capacity(c));
  }
  CHECK(total == 100);
}

TEST_CASE("shared fifo ignores class priority") {
  QueueSettings s;
  s.discipline = QueueDiscipline::shared_fifo;
  MultiQueueBuffer buf(s);
  buf.enqueue(TrafficClass::normal, 1);
  buf.enqueue(TrafficClass::emergency, 2);
  CHECK(buf.dequeue_next()->handle == 1);
  for (int i = 0; i < 120; ++i) buf.enqueue(TrafficClass::normal, 10 + i);
  CHECK(buf.size() == 100);
}

TEST_CASE("randomized buffer stays within its invariants") {
  MultiQueueBuffer buf;
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> op(0, 9), lane(0, 2);
  for (int step = 0; step < 20000; ++step) {
    const int o = op(rng);
    if (o < 6) {
      buf.enqueue(class_at(lane(rng)), static_cast<std::uint64_t>(step));
    } else if (o < 9) {
      buf.dequeue_next();
    } else {
      buf.close_window(0.5);
      buf.rebalance();
    }
    std::uint32_t cap = 0;
    for (TrafficClass c : kAllClasses) {
      cap += buf.capacity(c);
      REQUIRE(buf.occupancy(c) <= buf.capacity(c));
      REQUIRE(buf.capacity(c) >= 10);
      REQUIRE(buf.capacity(c) <= 80);
    }
    REQUIRE(cap == 100);
    REQUIRE(buf.size() <= 100);
  }
}

}
