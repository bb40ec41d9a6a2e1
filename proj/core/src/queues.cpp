#include "qqmr/queues.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qqmr {

PacketType classify(PayloadKind kind) {
  switch (kind) {
    case PayloadKind::cardiac_arrest_alert:
    case PayloadKind::arrhythmia_alert:
    case PayloadKind::heart_rate_drop_alert:
    case PayloadKind::seizure_alert:
      return PacketType::emergency;
    case PayloadKind::medical_image:
    case PayloadKind::diagnostic_signal:
      return PacketType::error_sensitive;
    case PayloadKind::temperature:
    case PayloadKind::humidity:
    case PayloadKind::status_report:
      return PacketType::normal;
  }
  return PacketType::normal;
}

double occupancy_step(double occupancy, double volume_in, double volume_out, double capacity) {
  return std::clamp(occupancy + volume_in - volume_out, 0.0, capacity);
}

double free_space(double total_capacity, const QueueVector& occupancy) {
  return total_capacity - std::accumulate(occupancy.begin(), occupancy.end(), 0.0);
}

QueueVector propose_capacities(const QueueVector& capacity, const QueueVector& occupancy,
                               const QueueVector& arrival_rate, double total_capacity,
                               double ell1, double ell2) {
  QueueVector ratio{};
  for (std::size_t p = 0; p < kClassCount; ++p) {
    ratio[p] = capacity[p] > 0.0 ? occupancy[p] / capacity[p] : 0.0;
  }
  const double ratio_sum = std::accumulate(ratio.begin(), ratio.end(), 0.0);
  const double rate_sum = std::accumulate(arrival_rate.begin(), arrival_rate.end(), 0.0);
  if (ratio_sum <= 0.0 && rate_sum <= 0.0) return capacity;

  const double f = free_space(total_capacity, occupancy);
  QueueVector out{};
  for (std::size_t p = 0; p < kClassCount; ++p) {
    double share = 0.0;
    if (ratio_sum > 0.0) share += ell1 * ratio[p] / ratio_sum;
    if (rate_sum > 0.0) share += ell2 * arrival_rate[p] / rate_sum;
    out[p] = capacity[p] + f * share;
  }
  return out;
}

QueueVector normalize_capacities(const QueueVector& proposed, double total_capacity) {
  const double sum = std::accumulate(proposed.begin(), proposed.end(), 0.0);
  if (sum <= 0.0) {
    QueueVector even{};
    even.fill(total_capacity / static_cast<double>(kClassCount));
    return even;
  }
  QueueVector out{};
  for (std::size_t p = 0; p < kClassCount; ++p) out[p] = proposed[p] / sum * total_capacity;
  return out;
}

QueueVector clamp_capacities(const QueueVector& target, const QueueVector& lower,
                             const QueueVector& upper, double total_capacity) {
  bool inside = true;
  for (std::size_t p = 0; p < kClassCount; ++p) {
    if (lower[p] > upper[p]) throw std::invalid_argument("queue bound lower > upper");
    inside = inside && target[p] >= lower[p] && target[p] <= upper[p];
  }
  const double lo_sum = std::accumulate(lower.begin(), lower.end(), 0.0);
  const double hi_sum = std::accumulate(upper.begin(), upper.end(), 0.0);
  if (lo_sum > total_capacity + 1e-9 || hi_sum < total_capacity - 1e-9) {
    throw std::invalid_argument("queue bounds cannot reach the total capacity");
  }
  if (inside) return target;

  // Shift every target by the same amount s and clip; the clipped sum is
  // nondecreasing in s, so bisection finds the s that restores the total.
  auto placed = [&](double s) {
    QueueVector v{};
    for (std::size_t p = 0; p < kClassCount; ++p) v[p] = std::clamp(target[p] + s, lower[p], upper[p]);
    return v;
  };
  auto sum_at = [&](double s) {
    const QueueVector v = placed(s);
    return std::accumulate(v.begin(), v.end(), 0.0);
  };
  double span = total_capacity + 1.0;
  for (std::size_t p = 0; p < kClassCount; ++p) {
    span = std::max({span, std::abs(target[p] - lower[p]), std::abs(target[p] - upper[p])});
  }
  double lo = -span;
  double hi = span;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = lo + (hi - lo) / 2.0;
    if (mid <= lo || mid >= hi) break;
    (sum_at(mid) < total_capacity ? lo : hi) = mid;
  }
  QueueVector v = placed(hi);
  // Put the last rounding residue on an entry with room for it.
  double residue = total_capacity - std::accumulate(v.begin(), v.end(), 0.0);
  for (std::size_t p = 0; p < kClassCount && residue != 0.0; ++p) {
    const double moved = std::clamp(v[p] + residue, lower[p], upper[p]) - v[p];
    v[p] += moved;
    residue -= moved;
  }
  return v;
}

QueueCounts round_capacities(const QueueVector& capacity, std::uint32_t total) {
  QueueCounts out{};
  std::array<double, kClassCount> remainder{};
  std::int64_t assigned = 0;
  for (std::size_t p = 0; p < kClassCount; ++p) {
    const double base = std::floor(capacity[p] + 1e-9);
    out[p] = static_cast<std::uint32_t>(std::max(0.0, base));
    remainder[p] = capacity[p] - base;
    assigned += out[p];
  }
  std::array<std::size_t, kClassCount> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  std::int64_t missing = static_cast<std::int64_t>(total) - assigned;
  for (std::size_t k = 0; missing > 0; k = (k + 1) % kClassCount, --missing) ++out[order[k]];
  for (std::size_t k = kClassCount; missing < 0; --missing) {
    k = (k == 0 ? kClassCount : k) - 1;
    if (out[order[k]] > 0) --out[order[k]];
  }
  return out;
}

QueueVector update_queue_capacities(const QueueVector& capacity, const QueueVector& occupancy,
                                    const QueueVector& arrival_rate, double total_capacity,
                                    double ell1, double ell2, double min_capacity,
                                    double max_capacity) {
  const QueueVector proposed =
      propose_capacities(capacity, occupancy, arrival_rate, total_capacity, ell1, ell2);
  const QueueVector normalized = normalize_capacities(proposed, total_capacity);
  QueueVector lower{};
  QueueVector upper{};
  for (std::size_t p = 0; p < kClassCount; ++p) {
    lower[p] = std::max(min_capacity, std::min(occupancy[p], max_capacity));
    upper[p] = max_capacity;
  }
  if (std::accumulate(lower.begin(), lower.end(), 0.0) > total_capacity) lower.fill(min_capacity);
  return clamp_capacities(normalized, lower, upper, total_capacity);
}

MultiQueueBuffer::MultiQueueBuffer(QueueSettings settings) : settings_(settings) {
  real_capacity_.fill(static_cast<double>(settings_.total_capacity) / kClassCount);
  capacity_ = round_capacities(real_capacity_, settings_.total_capacity);
}

EnqueueResult MultiQueueBuffer::enqueue(TrafficClass cls, Handle handle, double now) {
  const std::size_t p = index_of(cls);
  if (settings_.discipline == QueueDiscipline::shared_fifo) {
    if (size() >= settings_.total_capacity) return EnqueueResult::dropped_overflow;
    fifo_.push_back({handle, cls, now});
  } else {
    if (occupancy_[p] >= capacity_[p]) return EnqueueResult::dropped_overflow;
    queues_[p].push_back({handle, cls, now});
  }
  ++occupancy_[p];
  ++window_arrivals_[p];
  return EnqueueResult::accepted;
}

std::optional<MultiQueueBuffer::Item> MultiQueueBuffer::dequeue_next() {
  std::deque<Item>* source = nullptr;
  if (settings_.discipline == QueueDiscipline::shared_fifo) {
    if (!fifo_.empty()) source = &fifo_;
  } else {
    for (auto& q : queues_) {
      if (!q.empty()) {
        source = &q;
        break;
      }
    }
  }
  if (source == nullptr) return std::nullopt;
  Item item = source->front();
  source->pop_front();
  const std::size_t p = index_of(item.cls);
  --occupancy_[p];
  ++window_departures_[p];
  return item;
}

bool MultiQueueBuffer::is_full(TrafficClass cls) const {
  if (settings_.discipline == QueueDiscipline::shared_fifo) return size() >= settings_.total_capacity;
  return occupancy_[index_of(cls)] >= capacity_[index_of(cls)];
}

bool MultiQueueBuffer::empty() const { return size() == 0; }

std::uint32_t MultiQueueBuffer::size() const {
  return std::accumulate(occupancy_.begin(), occupancy_.end(), std::uint32_t{0});
}

std::uint32_t MultiQueueBuffer::free_space() const { return settings_.total_capacity - size(); }

void MultiQueueBuffer::close_window(double dt) {
  if (dt <= 0.0) return;
  const double s = settings_.rate_smoothing;
  for (std::size_t p = 0; p < kClassCount; ++p) {
    arrival_rate_[p] = (1.0 - s) * arrival_rate_[p] + s * window_arrivals_[p] / dt;
    departure_rate_[p] = (1.0 - s) * departure_rate_[p] + s * window_departures_[p] / dt;
  }
  window_arrivals_.fill(0);
  window_departures_.fill(0);
}

void MultiQueueBuffer::rebalance() {
  if (settings_.discipline == QueueDiscipline::shared_fifo) return;
  QueueVector occupancy{};
  for (std::size_t p = 0; p < kClassCount; ++p) occupancy[p] = occupancy_[p];
  real_capacity_ = update_queue_capacities(
      real_capacity_, occupancy, arrival_rate_, settings_.total_capacity, settings_.ell1,
      settings_.ell2, settings_.min_capacity, settings_.max_capacity);
  capacity_ = round_capacities(real_capacity_, settings_.total_capacity);
}

std::deque<MultiQueueBuffer::Item> MultiQueueBuffer::drain() {
  std::deque<Item> out;
  for (auto& q : queues_) {
    out.insert(out.end(), q.begin(), q.end());
    q.clear();
  }
  out.insert(out.end(), fifo_.begin(), fifo_.end());
  fifo_.clear();
  occupancy_.fill(0);
  return out;
}

}  // namespace qqmr
