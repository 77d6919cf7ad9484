#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "polyvisc/dataio.hpp"
#include "polyvisc/errors.hpp"
#include "polyvisc/fitting.hpp"
#include "polyvisc/uniaxial.hpp"

using namespace polyvisc;
using namespace polyvisc::fitting;

namespace {

MaterialParams hfpe285() { return {4.79e8, 1.43e9, 3.95e13, std::nullopt}; }

ExperimentalDataset synthetic(const MaterialParams& mp, double noise = 0.0, std::uint64_t seed = 7) {
  dataio::SyntheticSpec spec;
  spec.stress = 0.45 * 43e6;
  spec.load_time = 5e4;
  spec.unload_time = 5e4;
  spec.load_points = 50;
  spec.unload_points = 20;
  spec.noise = noise;
  spec.seed = seed;
  return dataio::synthesize_dataset(mp, spec);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(CreepError, SelfConsistentDataIsZero) {
  const auto mp = hfpe285();
  const auto ds = synthetic(mp);
  for (double w : {0.0, 0.5, 0.75, 1.0}) EXPECT_LE(creep_error(mp, ds, w), 1e-10);
}

TEST(CreepError, WeightOneIgnoresUnload) {
  const auto mp = hfpe285();
  MaterialParams other = mp;
  other.eta *= 1.3;
  const auto clean = synthetic(mp);
  auto corrupted = clean;
  for (auto& p : corrupted.unload) p.strain *= 3.0;
  EXPECT_DOUBLE_EQ(creep_error(other, clean, 1.0), creep_error(other, corrupted, 1.0));
  EXPECT_NE(creep_error(other, clean, 0.5), creep_error(other, corrupted, 0.5));
}

TEST(CreepError, FivePointHandEvaluation) {
  const auto mp = hfpe285();
  ExperimentalDataset ds;
  ds.stress = 2e7;
  ds.load = {{0.0, 0.0139}, {1e4, 0.0161}, {3e4, 0.0185}};
  ds.unload = {{4e4, 0.0051}, {6e4, 0.0012}};
  ds.unload_start = 4e4;
  const auto curve = uniaxial::simulate_creep(ds.segments(), mp);

  // Spreadsheet columns: theory, difference, squares.
  double num1 = 0, den1 = 0, num2 = 0, den2 = 0;
  for (const auto& p : ds.load) {
    const double d = curve.strain_at(p.t) - p.strain;
    num1 += d * d;
    den1 += p.strain * p.strain;
  }
  for (const auto& p : ds.unload) {
    const double d = curve.strain_at(p.t) - p.strain;
    num2 += d * d;
    den2 += p.strain * p.strain;
  }
  const double w = 0.75;
  const double expected = w * std::sqrt(num1 / den1) + (1 - w) * std::sqrt(num2 / den2);
  EXPECT_NEAR(creep_error(mp, ds, w), expected, 1e-14);
  EXPECT_NEAR(creep_error(curve, ds, w), expected, 1e-14);

  // Doubling the data does not halve the error.
  auto doubled = ds;
  for (auto& p : doubled.load) p.strain *= 2;
  for (auto& p : doubled.unload) p.strain *= 2;
  const double e2 = creep_error(mp, doubled, w);
  EXPECT_GT(std::abs(e2 - 0.5 * expected), 1e-3);
}

TEST(CreepError, LoadOnlyForcesUnitWeight) {
  const auto mp = hfpe285();
  auto ds = synthetic(mp);
  MaterialParams other = mp;
  other.mu_p_bar *= 1.1;
  const auto curve = uniaxial::simulate_creep(ds.segments(), other);
  const double loadOnly = creep_error(curve, ds, 1.0);
  ds.unload.clear();
  ds.unload_start.reset();
  EXPECT_EQ(creep_error(curve, ds, 0.0), loadOnly);
  EXPECT_EQ(creep_error(curve, ds, 0.5), loadOnly);
  // Re-simulating the shorter program moves the mesh, not the answer.
  EXPECT_NEAR(creep_error(other, ds, 0.0), loadOnly, 1e-6 * loadOnly);
}

TEST(CreepError, InvariantUnderReordering) {
  const auto mp = hfpe285();
  const auto ds = synthetic(mp, 0.01, 3);
  MaterialParams other = mp;
  other.mu_g_bar *= 0.9;
  const double base = creep_error(other, ds, 0.5);
  EXPECT_GT(base, 0.0);
  // The objective only sums over stamps; evaluating the same stamps in a
  // different order against the same curve must give the same value.
  const auto curve = uniaxial::simulate_creep(ds.segments(), other);
  auto shuffled = ds;
  std::mt19937_64 rng(5);
  std::shuffle(shuffled.load.begin(), shuffled.load.end(), rng);
  std::shuffle(shuffled.unload.begin(), shuffled.unload.end(), rng);
  EXPECT_NEAR(creep_error(curve, shuffled, 0.5), base, 1e-14 * base);
}

TEST(CreepError, NonNegativeAndPenaltyOnFailure) {
  const auto ds = synthetic(hfpe285(), 0.02, 11);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 0; n < 20; ++n) {
    MaterialParams mp{4.79e8 * std::exp(u(rng)), 1.43e9 * std::exp(u(rng)), 3.95e13 * std::exp(u(rng)),
                      std::nullopt};
    EXPECT_GE(creep_error(mp, ds, 0.5), 0.0);
  }
  MaterialParams bad = hfpe285();
  bad.mu_p_bar = -1.0;
  EXPECT_EQ(creep_error(bad, ds, 0.5), kPenalty);
  EXPECT_THROW(creep_error(hfpe285(), ds, 1.5), ConfigError);
}

TEST(NelderMead, ConvexQuadratic) {
  const auto r = nelder_mead([](std::span<const double> x) { return (x[0] - 1) * (x[0] - 1) + (x[1] - 2) * (x[1] - 2); },
                             {0.0, 0.0});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-6);
  EXPECT_NEAR(r.x[1], 2.0, 1e-6);
}

TEST(NelderMead, Rosenbrock) {
  const auto r = nelder_mead(
      [](std::span<const double> x) {
        return 100 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]) + (1 - x[0]) * (1 - x[0]);
      },
      {-1.2, 1.0});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-5);
  EXPECT_NEAR(r.x[1], 1.0, 1e-5);
  EXPECT_LE(r.iterations, 400u);
}

TEST(NelderMead, DegenerateCoordinateDoesNotDrift) {
  // Active coordinate starts at its optimum, so nothing pushes the
  // degenerate one.
  SimplexOptions opts;
  for (const std::vector<double> x0 : {std::vector<double>{1.0, 5.0}, std::vector<double>{1.0, -2.0}}) {
    const auto r = nelder_mead([](std::span<const double> x) { return (x[0] - 1) * (x[0] - 1); }, x0, opts);
    EXPECT_NEAR(r.x[0], 1.0, 1e-6);
    const double span = opts.initial_step * std::abs(x0[1]);
    EXPECT_GE(r.x[1], std::min(x0[1], x0[1] + span * (x0[1] < 0 ? -1 : 1)));
    EXPECT_LE(r.x[1], std::max(x0[1], x0[1] + span * (x0[1] < 0 ? -1 : 1)));
  }
}

TEST(NelderMead, NeverWorseThanStart) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const auto f = [](std::span<const double> x) {
    return std::sin(3 * x[0]) * std::cos(2 * x[1]) + 0.1 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  };
  for (int n = 0; n < 50; ++n) {
    const std::vector<double> x0{u(rng), u(rng), u(rng)};
    SimplexOptions opts;
    opts.max_iterations = 5 + n;
    const auto r = nelder_mead(f, x0, opts);
    EXPECT_LE(r.value, f(x0));
    EXPECT_DOUBLE_EQ(r.value, f(r.x));
  }
}

TEST(NelderMead, IterationCapReportsNotConverged) {
  SimplexOptions opts;
  opts.max_iterations = 10;
  const auto r = nelder_mead(
      [](std::span<const double> x) {
        return 100 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]) + (1 - x[0]) * (1 - x[0]);
      },
      {-1.2, 1.0}, opts);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 10u);
}

TEST(FitDataset, ZeroNoiseRecovery) {
  const auto truth = hfpe285();
  const auto ds = synthetic(truth);
  FitConfig cfg;
  cfg.initial = {6.0e8, 1.1e9, 5.0e13, std::nullopt};
  const auto fr = fit_dataset(ds, cfg);
  EXPECT_LE(rel(fr.params.mu_p_bar, truth.mu_p_bar), 1e-3);
  EXPECT_LE(rel(fr.params.mu_g_bar, truth.mu_g_bar), 1e-3);
  EXPECT_LE(rel(fr.params.eta, truth.eta), 1e-3);
  EXPECT_GE(fr.error, 0.0);

  // simulate -> fit -> simulate
  const auto a = uniaxial::simulate_creep(ds.segments(), truth);
  const auto b = uniaxial::simulate_creep(ds.segments(), fr.params);
  double worst = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const double t = a.end_time() * k / 1000;
    worst = std::max(worst, std::abs(a.strain_at(t) - b.strain_at(t)));
  }
  EXPECT_LE(worst, 1e-4);
}

TEST(FitDataset, NoisyRecoveryWithinFivePercent) {
  const auto truth = hfpe285();
  const auto ds = synthetic(truth, 0.005, 2024);
  FitConfig cfg;
  cfg.weight = 0.5;
  cfg.initial = {6.0e8, 1.1e9, 5.0e13, std::nullopt};
  const auto fr = fit_dataset(ds, cfg);
  EXPECT_LE(rel(fr.params.mu_p_bar, truth.mu_p_bar), 0.05);
  EXPECT_LE(rel(fr.params.mu_g_bar, truth.mu_g_bar), 0.05);
  EXPECT_LE(rel(fr.params.eta, truth.eta), 0.05);
  EXPECT_LE(fr.error, creep_error(truth, ds, 0.5) + 1e-12);
}

TEST(FitDataset, InitialGuessAtTruth) {
  const auto truth = hfpe285();
  const auto ds = synthetic(truth);
  FitConfig cfg;
  cfg.initial = truth;
  const auto fr = fit_dataset(ds, cfg);
  EXPECT_LE(fr.error, 1e-10);
  EXPECT_TRUE(fr.converged);
  EXPECT_LE(rel(fr.params.mu_p_bar, truth.mu_p_bar), 1e-6);
  EXPECT_LE(rel(fr.params.eta, truth.eta), 1e-6);
}

TEST(FitDataset, ConfigValidation) {
  FitConfig cfg;
  cfg.initial = hfpe285();
  cfg.weight = -0.1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.weight = 0.5;
  cfg.initial.eta = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Dataset, Validation) {
  ExperimentalDataset ds;
  ds.stress = 1e7;
  ds.load = {{0.0, 0.01}};
  EXPECT_THROW(ds.validate(), ConfigError);
  ds.load = {{0.0, 0.01}, {0.0, 0.011}};
  EXPECT_THROW(ds.validate(), ConfigError);
  ds.load = {{0.0, 0.01}, {10.0, 0.011}};
  ds.unload = {{5.0, 0.001}};
  EXPECT_THROW(ds.validate(), ConfigError);
  ds.unload = {{20.0, 0.001}};
  EXPECT_NO_THROW(ds.validate());
  EXPECT_DOUBLE_EQ(ds.unload_time(), 20.0);
}

TEST(CreepErrors, BatchMatchesSequential) {
  const auto mp = hfpe285();
  std::vector<ExperimentalDataset> sets;
  for (std::uint64_t s = 1; s <= 4; ++s) sets.push_back(synthetic(mp, 0.01, s));
  const auto batch = creep_errors(mp, sets, 0.75);
  ASSERT_EQ(batch.size(), sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) EXPECT_EQ(batch[i], creep_error(mp, sets[i], 0.75));
}
