#include "polyvisc/uniaxial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polyvisc/errors.hpp"

namespace polyvisc::uniaxial {

namespace {

constexpr double kRootTolerance = 1e-14;
constexpr int kRootMaxIterations = 200;
constexpr double kSmallStrainFraction = 0.05;

}  // namespace

double solve_B(double stress, double muPBar) {
  if (!(muPBar > 0.0)) throw DomainError("solve_B: mu_p_bar must be positive");
  if (!std::isfinite(stress)) throw DomainError("solve_B: stress must be finite");

  // With s = sqrt(B): g(s) = s^3 - a s - 1 has exactly one positive root.
  const double a = stress / muPBar;
  const auto g = [a](double s) { return s * s * s - a * s - 1.0; };
  double lo = 0.0;  // g(0) = -1
  double hi = 2.0 + std::abs(a);
  double s = std::clamp(1.0 + a / 3.0, lo, hi);
  if (!(s > lo && s < hi)) s = 0.5 * (lo + hi);

  for (int it = 0; it < kRootMaxIterations; ++it) {
    const double gs = g(s);
    if (gs == 0.0) break;
    (gs < 0.0 ? lo : hi) = s;
    const double dg = 3.0 * s * s - a;
    double next = dg != 0.0 ? s - gs / dg : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - s);
    s = next;
    if (step <= kRootTolerance * s || hi - lo <= kRootTolerance * s) break;
  }
  return s * s;
}

double lambda_rate(double lambda, double B, double Bdot, const MaterialParams& mp) {
  if (!(lambda > 0.0) || !(B > 0.0)) throw DomainError("lambda_rate: lambda and B must be positive");
  const double muP = mp.mu_p_bar;
  const double muG = mp.mu_g_bar;
  const double b32 = B * std::sqrt(B);
  // Pressure-difference term fixed by incompressibility of the natural map.
  const double multiplier = (muG * (lambda * lambda * lambda + 2.0 * B * B * B) - 3.0 * muP * B * B * lambda) /
                            (B * lambda * (1.0 + 2.0 * b32));
  const double bracket = muG * lambda * lambda / B - muP * B - multiplier;
  return lambda * (Bdot / (2.0 * B) - bracket / (mp.eta * B));
}

// ------------------------------------------------------------- CreepCurve

std::size_t CreepCurve::segment_at(double t) const {
  std::size_t k = 0;
  while (k + 1 < marks_.size() && marks_[k + 1].start <= t) ++k;
  return k;
}

double CreepCurve::stretch_at(double t) const { return dense_.at(segment_at(t))->at(t, 0); }

double CreepCurve::to_strain(double stretch) const {
  return engineering_ ? stretch - 1.0 : std::log(stretch);
}

double CreepCurve::strain_at(double t) const { return to_strain(stretch_at(t)); }

CreepCurve simulate_creep(const std::vector<CreepSegment>& segments, const MaterialParams& mp,
                          const CreepOptions& opts) {
  mp.validate();
  if (segments.empty()) throw ConfigError("simulate_creep: at least one segment is required");
  for (const auto& seg : segments) {
    if (!(seg.duration > 0.0)) throw ConfigError("simulate_creep: segment durations must be positive");
    if (!std::isfinite(seg.stress)) throw ConfigError("simulate_creep: segment stress must be finite");
  }

  const StretchRate law = opts.rate_law ? opts.rate_law : StretchRate(lambda_rate);
  CreepCurve curve;
  curve.engineering_ = opts.engineering_strain;

  double t = 0.0;
  double lambda = 1.0;
  double bPrev = 1.0;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const auto& seg = segments[k];
    const double B = solve_B(seg.stress, mp.mu_p_bar);
    // Instantaneous elastic jump; reduces to lambda(0) = sqrt(B0) from rest and
    // lambda -> lambda / lambda(0) on unloading a virgin load.
    lambda *= std::sqrt(B / bPrev);
    bPrev = B;
    curve.marks_.push_back({k, t, seg.stress, B});

    ode::OdeProblem problem;
    problem.t0 = t;
    problem.t1 = t + seg.duration;
    problem.y0 = {lambda};
    problem.rtol = opts.rtol;
    problem.atol = opts.atol;
    problem.rhs = [&law, &mp, B](double, std::span<const double> y, std::span<double> dy) {
      dy[0] = law(y[0], B, 0.0, mp);
    };
    auto sol = std::make_shared<const ode::OdeSolution>(ode::integrate(problem));

    const bool lastSegment = k + 1 == segments.size();
    const std::size_t count = lastSegment ? sol->size() : sol->size() - 1;
    for (std::size_t i = 0; i < count; ++i)
      curve.samples_.push_back({sol->times()[i], curve.to_strain(sol->state(i)[0])});

    lambda = sol->back_state()[0];
    t = problem.t1;
    curve.dense_.push_back(std::move(sol));
  }
  curve.end_ = t;
  return curve;
}

double sls_creep_analytic(double stress, const MaterialParams& mp, double t) {
  const double instantaneous = stress / (3.0 * mp.mu_p_bar);
  if (mp.mu_g_bar == 0.0) return instantaneous + 2.0 * stress / (3.0 * mp.eta) * t;
  const double tau = mp.eta / (2.0 * mp.mu_g_bar);
  return instantaneous + stress / (3.0 * mp.mu_g_bar) * (1.0 - std::exp(-t / tau));
}

bool sls_outside_small_strain(double stress, const MaterialParams& mp) {
  return std::abs(stress) > kSmallStrainFraction * mp.mu_p_bar;
}

double equilibrium_stretch(double stress, const MaterialParams& mp) {
  if (!(mp.mu_g_bar > 0.0)) throw ConfigError("equilibrium_stretch: no equilibrium for mu_g_bar = 0");
  const double B = solve_B(stress, mp.mu_p_bar);
  // lambda_rate < 0 above the equilibrium, > 0 below it.
  const auto rate = [&](double l) { return lambda_rate(l, B, 0.0, mp); };
  double lo = std::sqrt(B);
  double hi = lo;
  while (rate(lo) < 0.0) lo *= 0.5;
  while (rate(hi) > 0.0) hi *= 2.0;
  for (int it = 0; it < 300 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (rate(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace polyvisc::uniaxial
