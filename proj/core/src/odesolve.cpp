#include "polyvisc/odesolve.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace polyvisc::ode {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
// Fifth-order minus fourth-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kUnderflowFraction = 1e-12;
constexpr std::size_t kDenseCoefficients = 5;

class RhsCounter {
 public:
  RhsCounter(const Rhs& f, StepStats& stats) : f_(f), stats_(stats) {}
  void operator()(double t, std::span<const double> y, std::span<double> dydt) {
    ++stats_.rhs_evaluations;
    f_(t, y, dydt);
  }

 private:
  const Rhs& f_;
  StepStats& stats_;
};

double rms_norm(std::span<const double> v, std::span<const double> scale) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += (v[i] / scale[i]) * (v[i] / scale[i]);
  return v.empty() ? 0.0 : std::sqrt(s / static_cast<double>(v.size()));
}

double initial_step(RhsCounter& f, const OdeProblem& p, std::span<const double> f0, double span) {
  const std::size_t n = p.dimension();
  std::vector<double> sk(n), y1(n), f1(n), diff(n);
  for (std::size_t i = 0; i < n; ++i) sk[i] = p.atol + p.rtol * std::abs(p.y0[i]);
  const double dnf = rms_norm(f0, sk);
  const double dny = rms_norm(p.y0, sk);
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 * span : 0.01 * dny / dnf;
  h = std::min(h, span);
  for (std::size_t i = 0; i < n; ++i) y1[i] = p.y0[i] + h * f0[i];
  f(p.t0 + h, y1, f1);
  for (std::size_t i = 0; i < n; ++i) diff[i] = f1[i] - f0[i];
  const double der2 = rms_norm(diff, sk) / h;
  const double der12 = std::max(der2, dnf);
  const double h1 = der12 <= 1e-15 ? std::max(1e-6 * span, h * 1e-3) : std::pow(0.01 / der12, 0.2);
  return std::min({100.0 * h, h1, span});
}

}  // namespace

std::size_t OdeSolution::locate(double t) const {
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - t_.begin() - 1, 0));
  return std::min(idx, t_.size() - 2);
}

std::vector<double> OdeSolution::at(double t) const {
  std::vector<double> out(dim_);
  if (t_.size() == 1) {
    std::copy_n(y_.begin(), dim_, out.begin());
    return out;
  }
  for (std::size_t c = 0; c < dim_; ++c) out[c] = at(t, c);
  return out;
}

double OdeSolution::at(double t, std::size_t c) const {
  if (t_.size() == 1) return y_[c];
  t = std::clamp(t, t_.front(), t_.back());
  if (t == t_.back()) return y_[(t_.size() - 1) * dim_ + c];
  const std::size_t i = locate(t);
  const double h = t_[i + 1] - t_[i];
  const double theta = (t - t_[i]) / h;
  const double theta1 = 1.0 - theta;
  const double* r = dense_.data() + i * kDenseCoefficients * dim_;
  const double r1 = r[c], r2 = r[dim_ + c], r3 = r[2 * dim_ + c], r4 = r[3 * dim_ + c],
               r5 = r[4 * dim_ + c];
  return r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
}

OdeSolution DormandPrince::integrate(const OdeProblem& p) const {
  const std::size_t n = p.dimension();
  if (!p.rhs) throw ConfigError("OdeProblem: right-hand side not set");
  if (!(p.rtol > 0.0) || !(p.atol > 0.0)) throw ConfigError("OdeProblem: tolerances must be positive");
  if (!(p.t1 > p.t0)) throw ConfigError("OdeProblem: time span must be non-degenerate");

  OdeSolution sol(n);
  RhsCounter f(p.rhs, sol.stats_);
  const double span = p.t1 - p.t0;
  const double hmin = kUnderflowFraction * span;

  std::vector<double> y(p.y0), ynew(n), ytmp(n), err(n);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  sol.t_.push_back(p.t0);
  sol.y_.insert(sol.y_.end(), y.begin(), y.end());

  double t = p.t0;
  double h = 0.0;
  double errPrev = 1e-4;
  bool lastRejected = false;

  try {
    f(t, y, k1);
    h = p.initial_step > 0.0 ? std::min(p.initial_step, span) : initial_step(f, p, k1, span);

    while (t < p.t1) {
      if (sol.stats_.accepted + sol.stats_.rejected >= p.max_steps)
        throw OdeError("integrate: step limit reached", sol);
      if (h < hmin) throw OdeError("integrate: step size underflow (stiff or singular problem)", sol);
      bool last = false;
      if (t + h >= p.t1 - 0.5 * hmin) {
        h = p.t1 - t;
        last = true;
      }

      for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
      f(t + c2 * h, ytmp, k2);
      for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
      f(t + c3 * h, ytmp, k3);
      for (std::size_t i = 0; i < n; ++i)
        ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      f(t + c4 * h, ytmp, k4);
      for (std::size_t i = 0; i < n; ++i)
        ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      f(t + c5 * h, ytmp, k5);
      for (std::size_t i = 0; i < n; ++i)
        ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      f(t + h, ytmp, k6);
      for (std::size_t i = 0; i < n; ++i)
        ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
      const double tnew = last ? p.t1 : t + h;
      f(tnew, ynew, k7);

      double errNorm = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = p.atol + p.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        errNorm = std::max(errNorm, std::abs(e) / sc);
      }
      if (!std::isfinite(errNorm)) errNorm = 1e10;

      if (errNorm <= 1.0) {
        // Continuous extension coefficients for [t, tnew].
        const std::size_t base = sol.dense_.size();
        sol.dense_.resize(base + kDenseCoefficients * n);
        double* r = sol.dense_.data() + base;
        for (std::size_t i = 0; i < n; ++i) {
          const double ydiff = ynew[i] - y[i];
          const double bspl = h * k1[i] - ydiff;
          r[i] = y[i];
          r[n + i] = ydiff;
          r[2 * n + i] = bspl;
          r[3 * n + i] = ydiff - h * k7[i] - bspl;
          r[4 * n + i] =
              h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
        ++sol.stats_.accepted;
        t = tnew;
        y.swap(ynew);
        k1.swap(k7);
        if (p.post_step && p.post_step(t, y)) {
          // Shift the interpolant linearly so it ends on the modified state.
          for (std::size_t i = 0; i < n; ++i) r[n + i] = y[i] - r[i];
          f(t, y, k1);
        }
        sol.t_.push_back(t);
        sol.y_.insert(sol.y_.end(), y.begin(), y.end());

        double factor = kSafety * std::pow(std::max(errNorm, 1e-16), -kAlpha) * std::pow(errPrev, kBeta);
        factor = std::clamp(factor, kMinFactor, kMaxFactor);
        if (lastRejected) factor = std::min(factor, 1.0);
        errPrev = std::max(errNorm, 1e-4);
        lastRejected = false;
        h *= factor;
      } else {
        ++sol.stats_.rejected;
        lastRejected = true;
        h *= std::clamp(kSafety * std::pow(errNorm, -kAlpha), kMinFactor, 1.0);
      }
    }
  } catch (const OdeError&) {
    throw;
  } catch (const std::exception& e) {
    throw OdeError(std::string("integrate: right-hand side failed at t = ") + std::to_string(t) +
                       ": " + e.what(),
                   sol);
  }
  return sol;
}

OdeSolution integrate(const OdeProblem& problem) { return DormandPrince{}.integrate(problem); }

}  // namespace polyvisc::ode
