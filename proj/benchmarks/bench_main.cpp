#include "pkam/pkam.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

namespace {

pkam::Vec golden_pair() {
  pkam::Vec w(2);
  w << (std::sqrt(5.0) - 1.0) / 2.0, std::sqrt(2.0) - 1.0;
  return w;
}

pkam::FourierSeries random_series(int radius, std::uint64_t seed) {
  pkam::FourierSeries h(1, 1, {radius, radius});
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (std::size_t i = 0; i < h.mode_count(); ++i) {
    const auto k = h.mode(i);
    const double decay = std::exp(-0.1 * (std::abs(k[0]) + std::abs(k[1])));
    h.coeff(0, i) = pkam::Complex(g(rng), g(rng)) * decay;
  }
  h.symmetrize();
  h.set_average(pkam::Mat::Zero(1, 1));
  return h;
}

void BM_GridRoundTrip(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const pkam::FourierSeries h = random_series(n, 7);
  const pkam::GridShape g = pkam::padded_grid(h.radius());
  for (auto _ : state) {
    const pkam::GridField f = h.to_grid(g);
    benchmark::DoNotOptimize(pkam::FourierSeries::from_grid(f, h.radius()));
  }
}
BENCHMARK(BM_GridRoundTrip)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_SolveDifference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const pkam::FourierSeries h = random_series(n, 11);
  const pkam::Vec w = golden_pair();
  for (auto _ : state) benchmark::DoNotOptimize(pkam::solve_difference(h, w));
}
BENCHMARK(BM_SolveDifference)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

struct StepSetup {
  pkam::MapFamily f;
  pkam::PresymplecticStructure S = pkam::PresymplecticStructure::standard(1, 1);
  pkam::Vec omega;
  pkam::TorusEmbedding K;

  explicit StepSetup(int n) : omega(golden_pair()) {
    f = pkam::coupled_standard_family(0.3, 0.1, omega(1));
    pkam::Vec y0(1);
    y0 << omega(0);
    K = pkam::TorusEmbedding::flat(1, 1, {n, n}, y0);
  }
};

void BM_BuildFrame(benchmark::State& state) {
  const StepSetup s(static_cast<int>(state.range(0)));
  const pkam::Vec lambda = pkam::Vec::Zero(3);
  for (auto _ : state) benchmark::DoNotOptimize(pkam::build_frame(s.K, s.f, lambda, s.S, s.omega));
}
BENCHMARK(BM_BuildFrame)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_KamStep(benchmark::State& state) {
  const StepSetup s(static_cast<int>(state.range(0)));
  const pkam::Vec lambda = pkam::Vec::Zero(3);
  pkam::SolveConfig cfg;
  cfg.grow_truncation = false;
  for (auto _ : state) benchmark::DoNotOptimize(pkam::kam_step(s.K, lambda, s.f, s.S, s.omega, cfg));
}
BENCHMARK(BM_KamStep)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_DivisorScan(benchmark::State& state) {
  const pkam::Vec w = golden_pair();
  for (auto _ : state) benchmark::DoNotOptimize(pkam::scan_divisors(w, 2.0, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_DivisorScan)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
