#include <benchmark/benchmark.h>

#include "qqmr/queues.hpp"

namespace {

void BM_UpdateCapacities(benchmark::State& state) {
  qqmr::QueueVector c{40, 30, 30};
  const qqmr::QueueVector b{40, 10, 5}, lambda{2, 1, 1};
  for (auto _ : state) {
    c = qqmr::update_queue_capacities(c, b, lambda, 100, 0.5, 0.5, 10, 80);
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_UpdateCapacities);

void BM_EnqueueDequeue(benchmark::State& state) {
  qqmr::MultiQueueBuffer buffer;
  std::uint64_t handle = 0;
  for (auto _ : state) {
    buffer.enqueue(qqmr::class_at(handle % 3), handle);
    ++handle;
    if (buffer.size() > 50) benchmark::DoNotOptimize(buffer.dequeue_next());
  }
}
BENCHMARK(BM_EnqueueDequeue);

}  // namespace
