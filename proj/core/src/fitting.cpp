#include "polyvisc/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

#include "polyvisc/errors.hpp"

namespace polyvisc::fitting {

namespace {

void check_phase(const std::vector<StrainPoint>& pts, const char* name) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!std::isfinite(pts[i].t) || !std::isfinite(pts[i].strain))
      throw ConfigError(std::string(name) + " phase contains non-finite values");
    if (i > 0 && !(pts[i].t > pts[i - 1].t))
      throw ConfigError(std::string(name) + " phase times must be strictly increasing");
  }
}

// sqrt(sum (theory - exp)^2 / sum exp^2); the unnormalized root when the
// experimental strains are all zero.
double phase_misfit(const uniaxial::CreepCurve& curve, const std::vector<StrainPoint>& pts) {
  double num = 0.0;
  double den = 0.0;
  for (const auto& p : pts) {
    const double d = curve.strain_at(p.t) - p.strain;
    num += d * d;
    den += p.strain * p.strain;
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

std::vector<double> to_log(const MaterialParams& mp) {
  return {std::log(mp.mu_p_bar), std::log(mp.mu_g_bar), std::log(mp.eta)};
}

MaterialParams from_log(std::span<const double> x, const MaterialParams& base) {
  MaterialParams mp = base;
  mp.mu_p_bar = std::exp(x[0]);
  mp.mu_g_bar = std::exp(x[1]);
  mp.eta = std::exp(x[2]);
  return mp;
}

}  // namespace

// ------------------------------------------------------------- dataset

void ExperimentalDataset::validate() const {
  if (load.size() < 2) throw ConfigError("dataset: load phase needs at least two points");
  check_phase(load, "load");
  check_phase(unload, "unload");
  if (load.front().t < 0.0) throw ConfigError("dataset: times must be non-negative");
  if (!std::isfinite(stress)) throw ConfigError("dataset: stress must be finite");
  if (!unload.empty()) {
    const double tu = unload_time();
    if (!(tu > load.back().t))
      throw ConfigError("dataset: unloading must start after the last load sample");
    if (unload.front().t < tu) throw ConfigError("dataset: unload samples precede the unload time");
  } else if (unload_start && !(*unload_start > load.back().t)) {
    throw ConfigError("dataset: unloading must start after the last load sample");
  }
}

double ExperimentalDataset::unload_time() const {
  if (unload_start) return *unload_start;
  return unload.empty() ? load.back().t : unload.front().t;
}

double ExperimentalDataset::end_time() const {
  return unload.empty() ? load.back().t : unload.back().t;
}

std::vector<uniaxial::CreepSegment> ExperimentalDataset::segments() const {
  std::vector<uniaxial::CreepSegment> segs{{stress, unload.empty() ? load.back().t : unload_time()}};
  if (!unload.empty() && end_time() > unload_time()) segs.push_back({0.0, end_time() - unload_time()});
  else if (!unload.empty()) segs.push_back({0.0, std::max(1e-9 * end_time(), 1e-12)});
  return segs;
}

// ------------------------------------------------------------- objective

double creep_error(const uniaxial::CreepCurve& curve, const ExperimentalDataset& ds, double w) {
  if (ds.unload.empty()) return phase_misfit(curve, ds.load);
  return w * phase_misfit(curve, ds.load) + (1.0 - w) * phase_misfit(curve, ds.unload);
}

double creep_error(const MaterialParams& mp, const ExperimentalDataset& ds, double w,
                   const uniaxial::CreepOptions& opts) {
  if (w < 0.0 || w > 1.0) throw ConfigError("creep_error: weight must lie in [0, 1]");
  try {
    const auto curve = uniaxial::simulate_creep(ds.segments(), mp, opts);
    const double e = creep_error(curve, ds, w);
    return std::isfinite(e) ? e : kPenalty;
  } catch (const NumericalError&) {
    return kPenalty;
  } catch (const DomainError&) {
    return kPenalty;
  } catch (const ConfigError&) {
    return kPenalty;
  }
}

std::vector<double> creep_errors(const MaterialParams& mp, const std::vector<ExperimentalDataset>& sets,
                                 double w) {
  std::vector<std::future<double>> jobs;
  jobs.reserve(sets.size());
  for (const auto& ds : sets)
    jobs.push_back(std::async(std::launch::async, [&mp, &ds, w] { return creep_error(mp, ds, w); }));
  std::vector<double> out;
  out.reserve(sets.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

// ----------------------------------------------------------- Nelder-Mead

SimplexResult nelder_mead(const Objective& f, std::vector<double> x0, const SimplexOptions& opts) {
  const std::size_t n = x0.size();
  if (n == 0) throw ConfigError("nelder_mead: empty parameter vector");

  SimplexResult result;
  const auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<std::vector<double>> xs(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i)
    xs[i + 1][i] = x0[i] != 0.0 ? (1.0 + opts.initial_step) * x0[i] : 0.00025;
  std::vector<double> fs(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fs[i] = eval(xs[i]);
  if (!std::isfinite(fs[0])) throw ConfigError("nelder_mead: objective not finite at the initial point");

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);

  const auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    std::vector<std::vector<double>> xs2(n + 1);
    std::vector<double> fs2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      xs2[i] = std::move(xs[order[i]]);
      fs2[i] = fs[order[i]];
    }
    xs = std::move(xs2);
    fs = std::move(fs2);
  };
  const auto converged = [&] {
    double diameter = 0.0;
    double scale = 1.0;
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(xs[0][j]));
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j) diameter = std::max(diameter, std::abs(xs[i][j] - xs[0][j]));
    return diameter <= opts.x_tolerance * scale && fs[n] - fs[0] <= opts.f_tolerance;
  };
  const auto along = [&](double coeff, const std::vector<double>& from, std::vector<double>& out) {
    for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + coeff * (from[j] - centroid[j]);
  };

  sort_simplex();
  while (!converged()) {
    if (result.iterations >= opts.max_iterations) break;
    ++result.iterations;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += xs[i][j] / static_cast<double>(n);

    along(-opts.reflection, xs[n], xr);
    const double fr = eval(xr);
    bool shrink = false;

    if (fr < fs[0]) {
      along(opts.expansion, xr, xe);
      const double fe = eval(xe);
      if (fe < fr) {
        xs[n] = xe;
        fs[n] = fe;
      } else {
        xs[n] = xr;
        fs[n] = fr;
      }
    } else if (fr < fs[n - 1]) {
      xs[n] = xr;
      fs[n] = fr;
    } else if (fr < fs[n]) {
      along(opts.contraction, xr, xc);
      const double fc = eval(xc);
      if (fc <= fr) {
        xs[n] = xc;
        fs[n] = fc;
      } else {
        shrink = true;
      }
    } else {
      along(opts.contraction, xs[n], xc);
      const double fc = eval(xc);
      if (fc < fs[n]) {
        xs[n] = xc;
        fs[n] = fc;
      } else {
        shrink = true;
      }
    }

    if (shrink) {
      for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 0; j < n; ++j) xs[i][j] = xs[0][j] + opts.shrink * (xs[i][j] - xs[0][j]);
        fs[i] = eval(xs[i]);
      }
    }
    sort_simplex();
  }

  result.converged = converged();
  result.x = xs[0];
  result.value = fs[0];
  return result;
}

// ------------------------------------------------------------------ fit

void FitConfig::validate() const {
  if (!(weight >= 0.0 && weight <= 1.0)) throw ConfigError("fit: weight must lie in [0, 1]");
  if (!(initial.mu_p_bar > 0.0 && initial.mu_g_bar > 0.0 && initial.eta > 0.0))
    throw ConfigError("fit: initial guess must be strictly positive");
}

FitResult fit_dataset(const ExperimentalDataset& ds, const FitConfig& cfg) {
  ds.validate();
  cfg.validate();
  const double w = ds.unload.empty() ? 1.0 : cfg.weight;
  const Objective objective = [&](std::span<const double> x) {
    return creep_error(from_log(x, cfg.initial), ds, w, cfg.creep);
  };

  FitResult out;
  out.weight = w;
  SimplexResult best = nelder_mead(objective, to_log(cfg.initial), cfg.simplex);
  std::size_t iterations = best.iterations;
  for (int r = 0; r < cfg.restarts && iterations < cfg.simplex.max_iterations; ++r) {
    SimplexOptions again = cfg.simplex;
    again.max_iterations = cfg.simplex.max_iterations - iterations;
    again.initial_step = std::min(cfg.simplex.initial_step, 0.01);
    SimplexResult next = nelder_mead(objective, best.x, again);
    iterations += next.iterations;
    const bool improved = next.value < best.value - cfg.simplex.f_tolerance;
    if (next.value <= best.value) best = std::move(next);
    if (!improved) break;
  }

  out.params = from_log(best.x, cfg.initial);
  out.error = best.value;
  out.iterations = iterations;
  out.converged = best.converged;
  return out;
}

}  // namespace polyvisc::fitting
