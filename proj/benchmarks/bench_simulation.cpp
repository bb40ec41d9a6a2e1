#include <benchmark/benchmark.h>

#include "qqmr/simulation.hpp"

namespace {

void run_cell(benchmark::State& state, qqmr::Protocol protocol) {
  qqmr::SimConfig c;
  c.node_count = static_cast<std::uint32_t>(state.range(0));
  c.area_side = 150;
  c.sim_duration = 10;
  c.send_rate = 1;
  for (auto _ : state) benchmark::DoNotOptimize(qqmr::run_scenario(c, protocol));
}

void BM_SimQqmr(benchmark::State& state) { run_cell(state, qqmr::Protocol::qqmr); }
void BM_SimGreedy(benchmark::State& state) { run_cell(state, qqmr::Protocol::greedy); }
BENCHMARK(BM_SimQqmr)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimGreedy)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
