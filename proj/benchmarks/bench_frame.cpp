#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "qqmr/frame.hpp"

namespace {

void BM_Checksum(benchmark::State& state) {
  const std::vector<std::uint8_t> bytes(static_cast<std::size_t>(state.range(0)), 0x5A);
  for (auto _ : state) benchmark::DoNotOptimize(qqmr::compute_checksum(bytes));
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Checksum)->Arg(64)->Arg(525)->Arg(4096);

void BM_SealAndVerify(benchmark::State& state) {
  qqmr::DataPacket p;
  p.payload.assign(512, 0x33);
  for (auto _ : state) {
    const auto frame = qqmr::seal(p);
    benchmark::DoNotOptimize(qqmr::verify_checksum(frame));
  }
}
BENCHMARK(BM_SealAndVerify);

}  // namespace
