#include "polyvisc/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "polyvisc/errors.hpp"

namespace polyvisc::kinematics {

Tensor3 uniaxial_F(double lambda) {
  if (!(lambda > 0.0)) throw DomainError("uniaxial_F: stretch must be positive");
  const double lateral = 1.0 / std::sqrt(lambda);
  return Tensor3::diag(lambda, lateral, lateral);
}

Tensor3 uniaxial_L(double lambda, double lambdaRate) {
  if (!(lambda > 0.0)) throw DomainError("uniaxial_L: stretch must be positive");
  const double axial = lambdaRate / lambda;
  return Tensor3::diag(axial, -0.5 * axial, -0.5 * axial);
}

Tensor3 simple_shear_F(double gamma) {
  Tensor3 f = Tensor3::identity();
  f(0, 1) = gamma;
  return f;
}

Tensor3 simple_shear_L(double gammaRate) {
  Tensor3 l;
  l(0, 1) = gammaRate;
  return l;
}

// ----------------------------------------------------------- MonotoneCubic

MonotoneCubic::MonotoneCubic(std::vector<double> t, std::vector<double> y)
    : t_(std::move(t)), y_(std::move(y)) {
  const std::size_t n = t_.size();
  if (n < 2 || y_.size() != n) throw ConfigError("MonotoneCubic: need at least two (t, y) pairs");
  for (std::size_t i = 1; i < n; ++i)
    if (!(t_[i] > t_[i - 1])) throw ConfigError("MonotoneCubic: times must be strictly increasing");

  std::vector<double> secant(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) secant[i] = (y_[i + 1] - y_[i]) / (t_[i + 1] - t_[i]);

  slope_.assign(n, 0.0);
  slope_[0] = secant[0];
  slope_[n - 1] = secant[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i)
    slope_[i] = (secant[i - 1] * secant[i] <= 0.0) ? 0.0 : 0.5 * (secant[i - 1] + secant[i]);

  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (secant[i] == 0.0) {
      slope_[i] = slope_[i + 1] = 0.0;
      continue;
    }
    const double a = slope_[i] / secant[i];
    const double b = slope_[i + 1] / secant[i];
    const double r = a * a + b * b;
    if (r > 9.0) {
      const double tau = 3.0 / std::sqrt(r);
      slope_[i] = tau * a * secant[i];
      slope_[i + 1] = tau * b * secant[i];
    }
  }
}

std::size_t MonotoneCubic::interval(double t) const {
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - t_.begin() - 1, 0));
  return std::min(idx, t_.size() - 2);
}

double MonotoneCubic::value(double t) const {
  t = std::clamp(t, t_.front(), t_.back());
  const std::size_t i = interval(t);
  const double h = t_[i + 1] - t_[i];
  const double s = (t - t_[i]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * y_[i] + h10 * h * slope_[i] + h01 * y_[i + 1] + h11 * h * slope_[i + 1];
}

double MonotoneCubic::derivative(double t) const {
  t = std::clamp(t, t_.front(), t_.back());
  const std::size_t i = interval(t);
  const double h = t_[i + 1] - t_[i];
  const double s = (t - t_[i]) / h;
  const double d00 = 6 * s * s - 6 * s;
  const double d10 = 3 * s * s - 4 * s + 1;
  const double d01 = -d00;
  const double d11 = 3 * s * s - 2 * s;
  return (d00 * y_[i] + d01 * y_[i + 1]) / h + d10 * slope_[i] + d11 * slope_[i + 1];
}

// ---------------------------------------------------------- MotionProtocol

MotionProtocol::MotionProtocol(MotionKind kind, Scalar drive, Scalar rate, double t0, double t1)
    : kind_(kind), drive_(std::move(drive)), rate_(std::move(rate)), t0_(t0), t1_(t1) {
  if (!(t1 > t0)) throw ConfigError("MotionProtocol: time span must be non-degenerate");
  if (!drive_ || !rate_) throw ConfigError("MotionProtocol: driving functions must be set");
}

MotionProtocol MotionProtocol::uniaxial(Scalar stretch, Scalar stretchRate, double t0, double t1) {
  return MotionProtocol(MotionKind::Uniaxial, std::move(stretch), std::move(stretchRate), t0, t1);
}

MotionProtocol MotionProtocol::simple_shear(Scalar shear, Scalar shearRate, double t0, double t1) {
  return MotionProtocol(MotionKind::SimpleShear, std::move(shear), std::move(shearRate), t0, t1);
}

MotionProtocol MotionProtocol::sampled(std::vector<double> t, std::vector<double> stretch) {
  if (std::any_of(stretch.begin(), stretch.end(), [](double v) { return !(v > 0.0); }))
    throw ConfigError("sampled protocol: stretches must be positive");
  auto spline = std::make_shared<const MonotoneCubic>(std::move(t), std::move(stretch));
  const double t0 = spline->front();
  const double t1 = spline->back();
  return MotionProtocol(
      MotionKind::Sampled, [spline](double s) { return spline->value(s); },
      [spline](double s) { return spline->derivative(s); }, t0, t1);
}

MotionProtocol MotionProtocol::constant_strain_rate(double rate, double t0, double t1) {
  return uniaxial([=](double t) { return std::exp(rate * (t - t0)); },
                  [=](double t) { return rate * std::exp(rate * (t - t0)); }, t0, t1);
}

MotionProtocol MotionProtocol::hold(double stretch, double t0, double t1) {
  if (!(stretch > 0.0)) throw ConfigError("hold protocol: stretch must be positive");
  return uniaxial([=](double) { return stretch; }, [](double) { return 0.0; }, t0, t1);
}

MotionProtocol MotionProtocol::rotated(const Tensor3& q) const {
  MotionProtocol p = *this;
  p.rotation_ = q * rotation_;
  p.rotated_ = true;
  return p;
}

Tensor3 MotionProtocol::F(double t) const {
  const double s = drive_(t);
  const Tensor3 f = is_axial() ? uniaxial_F(s) : simple_shear_F(s);
  return rotated_ ? rotation_ * f : f;
}

Tensor3 MotionProtocol::L(double t) const {
  const Tensor3 l = is_axial() ? uniaxial_L(drive_(t), rate_(t)) : simple_shear_L(rate_(t));
  return rotated_ ? rotation_ * l * rotation_.transpose() : l;
}

// ------------------------------------------------------------ natural maps

NaturalMaps natural_maps(const SymTensor3& B, const SymTensor3& Bp) {
  NaturalMaps maps;
  maps.Bp_spectral = tensors::eig_sym(Bp);
  maps.V = tensors::sqrt_spd(maps.Bp_spectral);
  maps.V_inv = tensors::inverse_sqrt_spd(maps.Bp_spectral);
  maps.B_G = tensors::sandwich(maps.V_inv, B);
  return maps;
}

Tensor3 natural_G(const Tensor3& F, const SymTensor3& Bp) {
  const auto d = tensors::eig_sym(Bp);
  return tensors::inverse_sqrt_spd(d).full() * F;
}

}  // namespace polyvisc::kinematics
