#include <benchmark/benchmark.h>

#include <cstdint>

#include "polgeo/hinf.hpp"
#include "polgeo/lqg.hpp"
#include "polgeo/lqr.hpp"
#include "polgeo/lyapunov.hpp"
#include "polgeo/rng.hpp"

using namespace polgeo;

namespace {

Mat gaussian(std::size_t r, std::size_t c, CounterRng& rng) {
  Mat m(r, c);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = rng.normal();
  return m;
}

// Random A rescaled to spectral radius rho.
Mat stable(std::size_t n, double rho, std::uint64_t seed) {
  CounterRng rng(seed);
  const Mat g = gaussian(n, n, rng);
  return (rho / spectral_radius(g)) * g;
}

Mat spd(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed, 1);
  const Mat g = gaussian(n, n, rng);
  return g * transpose(g) + Mat::identity(n);
}

void BM_DlyapSmith(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Mat a = stable(n, 0.9, 1), q = spd(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(dlyap(a, q));
}
BENCHMARK(BM_DlyapSmith)->Arg(2)->Arg(4)->Arg(8)->Arg(12)->Arg(16);

void BM_DlyapKronecker(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Mat a = stable(n, 0.9, 1), q = spd(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(dlyap_kron_oracle(a, q));
}
BENCHMARK(BM_DlyapKronecker)->Arg(2)->Arg(4)->Arg(8)->Arg(12);

void BM_SpectralRadius(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Mat a = stable(n, 0.95, 3);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_radius(a));
}
BENCHMARK(BM_SpectralRadius)->Arg(2)->Arg(4)->Arg(8);

void BM_LqrGradient(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  CounterRng rng(5);
  const Plant p = identity_weighted_plant(stable(n, 0.9, 4), gaussian(n, 2, rng));
  const StaticGain k = StaticGain::certify(p, Mat(2, n));
  for (auto _ : state) benchmark::DoNotOptimize(lqr_grad_euclidean(p, k));
}
BENCHMARK(BM_LqrGradient)->Arg(2)->Arg(4)->Arg(8);

void BM_HinfCost(benchmark::State& state) {
  const Plant p = scalar_plant(0.9, 1.0);
  const StaticGain k = StaticGain::certify(p, Mat::scalar(-0.5));
  const auto grid = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hinf_cost(p, k, grid));
}
BENCHMARK(BM_HinfCost)->Arg(256)->Arg(2048)->Arg(8192);

void BM_LqgGradient(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Plant p = identity_weighted_plant(stable(n, 0.5, 6), Mat::identity(n));
  p.C = Mat::identity(n);
  p.W = Mat::identity(n);
  p.V = Mat::identity(n);
  const DynamicPolicy kd{stable(n, 0.3, 7), 0.1 * Mat::identity(n), -0.1 * Mat::identity(n)};
  for (auto _ : state) benchmark::DoNotOptimize(lqg_grad(p, kd));
}
BENCHMARK(BM_LqgGradient)->Arg(2)->Arg(4)->Arg(8);

void BM_KmGradient(benchmark::State& state) {
  const Plant p = scalar_plant(0.9, 1.0);
  const DynamicPolicy kd{Mat::scalar(0.1), Mat::scalar(0.3), Mat::scalar(-0.2)};
  for (auto _ : state) benchmark::DoNotOptimize(km_grad(p, kd, KmMetric{}));
}
BENCHMARK(BM_KmGradient);

}  // namespace

BENCHMARK_MAIN();
