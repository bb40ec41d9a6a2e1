#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "qqmr/wfcm.hpp"

namespace {

std::vector<qqmr::FeatureVector> random_features(std::size_t n) {
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<qqmr::FeatureVector> x(n);
  for (auto& row : x) {
    for (double& v : row) v = unit(rng);
  }
  return x;
}

void BM_RunWfcm(benchmark::State& state) {
  const auto x = random_features(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(qqmr::run_wfcm(x, qqmr::WfcmParams{}));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RunWfcm)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

void BM_MembershipSweep(benchmark::State& state) {
  const auto x = random_features(static_cast<std::size_t>(state.range(0)));
  const qqmr::Centers v{x[0], x[1], x[2]};
  for (auto _ : state) {
    benchmark::DoNotOptimize(qqmr::update_memberships(x, v, qqmr::kInitialWeights, 2.0));
  }
}
BENCHMARK(BM_MembershipSweep)->Arg(100)->Arg(1000);

}  // namespace
