#include <benchmark/benchmark.h>

#include <random>

#include "polyvisc/dataio.hpp"
#include "polyvisc/evolution.hpp"
#include "polyvisc/fitting.hpp"
#include "polyvisc/tensors.hpp"
#include "polyvisc/uniaxial.hpp"

using namespace polyvisc;

namespace {

const material::MaterialParams kPmr15{3.76e8, 4.42e8, 6.22e12, std::nullopt};

tensors::SymTensor3 unimodular(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  const double a = u(rng), b = u(rng), c = u(rng);
  const tensors::SymTensor3 s({a, b, -a - b, c, 0.5 * c, -c});
  return tensors::eig_sym(s).map([](double x) { return std::exp(x); });
}

}  // namespace

static void BM_SolveB(benchmark::State& state) {
  double stress = 1e7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(uniaxial::solve_B(stress, kPmr15.mu_p_bar));
    stress += 1.0;
  }
}
BENCHMARK(BM_SolveB);

static void BM_EigSym(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto a = unimodular(rng);
  for (auto _ : state) benchmark::DoNotOptimize(tensors::eig_sym(a));
}
BENCHMARK(BM_EigSym);

static void BM_DGRate(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto bp = unimodular(rng);
  const auto bg = unimodular(rng);
  for (auto _ : state) benchmark::DoNotOptimize(evolution::dG_rate(bp, bg, kPmr15));
}
BENCHMARK(BM_DGRate);

static void BM_SimulateCreep(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(uniaxial::simulate_creep({{1e7, 7e4}, {0.0, 7e4}}, kPmr15));
}
BENCHMARK(BM_SimulateCreep)->Unit(benchmark::kMicrosecond);

static void BM_DriveShear(benchmark::State& state) {
  const auto shear = kinematics::MotionProtocol::simple_shear([](double t) { return 1e-5 * t; },
                                                              [](double) { return 1e-5; }, 0.0, 2e4);
  for (auto _ : state) benchmark::DoNotOptimize(evolution::drive(shear, kPmr15, {}));
}
BENCHMARK(BM_DriveShear)->Unit(benchmark::kMicrosecond);

static void BM_CreepError(benchmark::State& state) {
  dataio::SyntheticSpec spec;
  spec.stress = 1e7;
  spec.load_time = 7e4;
  spec.unload_time = 7e4;
  const auto ds = dataio::synthesize_dataset(kPmr15, spec);
  for (auto _ : state) benchmark::DoNotOptimize(fitting::creep_error(kPmr15, ds, 0.75));
}
BENCHMARK(BM_CreepError)->Unit(benchmark::kMicrosecond);

static void BM_FitDataset(benchmark::State& state) {
  dataio::SyntheticSpec spec;
  spec.stress = 1e7;
  spec.load_time = 5e4;
  spec.unload_time = 5e4;
  spec.noise = 0.005;
  const auto ds = dataio::synthesize_dataset(kPmr15, spec);
  fitting::FitConfig cfg;
  cfg.initial = {5e8, 5e8, 1e13, std::nullopt};
  for (auto _ : state) benchmark::DoNotOptimize(fitting::fit_dataset(ds, cfg));
}
BENCHMARK(BM_FitDataset)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
