#include "polyvisc/material.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polyvisc/errors.hpp"

namespace polyvisc::material {

namespace {

constexpr double kDissipationFloor = 1e-30;

const ThermalParams kDefaultThermal{};

struct ModulusCoefficients {
  double p0, p1, g0, g1;
};

// Without an affine law the moduli are temperature independent:
// mu0 = mu_bar theta_s, mu1 = 0.
ModulusCoefficients coefficients(const MaterialParams& mp, const ThermalParams& tp) {
  if (tp.moduli) return {tp.moduli->mu_p0, tp.moduli->mu_p1, tp.moduli->mu_g0, tp.moduli->mu_g1};
  return {mp.mu_p_bar * tp.theta_s, 0.0, mp.mu_g_bar * tp.theta_s, 0.0};
}

void require_state(const SymTensor3& Bp, const SymTensor3& BG, const ThermalState& th) {
  if (!(th.theta > 0.0)) throw DomainError("temperature must be positive");
  if (!tensors::is_spd(Bp)) throw DomainError("B_p is not symmetric positive definite");
  if (!tensors::is_spd(BG)) throw DomainError("B_G is not symmetric positive definite");
}

double thermal_free_energy(const ThermalParams& tp, double theta) {
  const double d = theta - tp.theta_s;
  return tp.A_s + (tp.B_s + tp.c2) * d - 0.5 * tp.c1 * d * d -
         tp.c2 * theta * std::log(theta / tp.theta_s);
}

}  // namespace

void MaterialParams::validate() const {
  if (!(mu_p_bar > 0.0) || !std::isfinite(mu_p_bar))
    throw ConfigError("mu_p_bar must be positive and finite");
  if (!(mu_g_bar >= 0.0) || !std::isfinite(mu_g_bar))
    throw ConfigError("mu_g_bar must be non-negative and finite");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("eta must be positive and finite");
  if (thermal) {
    if (!(thermal->theta_s > 0.0)) throw ConfigError("theta_s must be positive");
    if (!(thermal->conductivity >= 0.0)) throw ConfigError("conductivity must be non-negative");
    if (!(thermal->density > 0.0)) throw ConfigError("density must be positive");
  }
}

const ThermalParams& MaterialParams::thermal_or_default() const {
  return thermal ? *thermal : kDefaultThermal;
}

MaterialParams MaterialParams::at_temperature(double theta) const {
  MaterialParams out = *this;
  const auto& tp = thermal_or_default();
  if (tp.moduli) {
    out.mu_p_bar = mu_bar(tp.moduli->mu_p0, tp.moduli->mu_p1, theta, tp.theta_s);
    // A vanishing second spring is admissible (Maxwell limit).
    out.mu_g_bar = (tp.moduli->mu_g0 - tp.moduli->mu_g1 * theta) / tp.theta_s;
    if (out.mu_g_bar < 0.0) throw ConfigError("mu_g_bar negative at this temperature");
  }
  return out;
}

double MaterialParams::creep_time_constant() const {
  if (!(mu_g_bar > 0.0)) throw ConfigError("creep time constant undefined for mu_g_bar = 0");
  return eta / (2.0 * mu_g_bar);
}

double mu_bar(double mu0, double mu1, double theta, double thetaS) {
  if (!(thetaS > 0.0)) throw ConfigError("theta_s must be positive");
  const double value = (mu0 - mu1 * theta) / thetaS;
  if (!(value > 0.0))
    throw ConfigError("non-physical modulus " + std::to_string(value) + " Pa at theta = " +
                      std::to_string(theta) + " K");
  return value;
}

double helmholtz(const SymTensor3& Bp, const SymTensor3& BG, const ThermalState& th,
                 const MaterialParams& mp) {
  require_state(Bp, BG, th);
  const auto& tp = mp.thermal_or_default();
  const auto k = coefficients(mp, tp);
  const double scale = 2.0 * tp.density * tp.theta_s;
  return thermal_free_energy(tp, th.theta) + (k.g0 - k.g1 * th.theta) / scale * (BG.trace() - 3.0) +
         (k.p0 - k.p1 * th.theta) / scale * (Bp.trace() - 3.0);
}

double entropy(const SymTensor3& Bp, const SymTensor3& BG, const ThermalState& th,
               const MaterialParams& mp) {
  require_state(Bp, BG, th);
  const auto& tp = mp.thermal_or_default();
  const auto k = coefficients(mp, tp);
  const double scale = 2.0 * tp.density * tp.theta_s;
  return -(tp.B_s + tp.c2) + tp.c1 * (th.theta - tp.theta_s) + tp.c2 * std::log(th.theta / tp.theta_s) +
         tp.c2 + k.g1 / scale * (BG.trace() - 3.0) + k.p1 / scale * (Bp.trace() - 3.0);
}

double internal_energy(const SymTensor3& Bp, const SymTensor3& BG, const ThermalState& th,
                       const MaterialParams& mp) {
  require_state(Bp, BG, th);
  const auto& tp = mp.thermal_or_default();
  const auto k = coefficients(mp, tp);
  const double scale = 2.0 * tp.density * tp.theta_s;
  return tp.A_s - tp.B_s * tp.theta_s + tp.c2 * (th.theta - tp.theta_s) +
         0.5 * tp.c1 * (th.theta * th.theta - tp.theta_s * tp.theta_s) +
         k.g0 / scale * (BG.trace() - 3.0) + k.p0 / scale * (Bp.trace() - 3.0);
}

double heat_capacity(const ThermalState& th, const MaterialParams& mp) {
  const auto& tp = mp.thermal_or_default();
  return tp.c1 * th.theta + tp.c2;
}

HeatFlux heat_flux(const ThermalState& th, const MaterialParams& mp) {
  const double k = mp.thermal_or_default().conductivity;
  if (k < 0.0) throw ConfigError("thermal conductivity must be non-negative");
  if (!(th.theta > 0.0)) throw DomainError("temperature must be positive");
  HeatFlux out;
  double g2 = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    out.q[i] = -k * th.grad_theta[i];
    g2 += th.grad_theta[i] * th.grad_theta[i];
  }
  out.conduction_dissipation = k * g2 / th.theta;
  return out;
}

SymTensor3 stress(const SymTensor3& Bp, double p, const MaterialParams& mp) {
  return p * SymTensor3::identity() + mp.mu_p_bar * Bp;
}

double traction_free_pressure(const SymTensor3& Bp, const std::array<double, 3>& n,
                              const MaterialParams& mp) {
  double nBn = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) nBn += n[i] * Bp(i, j) * n[j];
  return -mp.mu_p_bar * nBn;
}

double traceless_pressure(const SymTensor3& Bp, const MaterialParams& mp) {
  return -mp.mu_p_bar * Bp.trace() / 3.0;
}

Dissipation dissipation_rate(const SymTensor3& Bp, const SymTensor3& DG, const MaterialParams& mp,
                             const ThermalState& th) {
  // D_G . (B_p D_G) = tr(D_G B_p D_G), a PSD quadratic form for SPD B_p.
  const tensors::Tensor3 bd = Bp * DG;
  double contraction = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) contraction += DG(i, j) * bd(i, j);
  Dissipation out;
  out.xi_m = mp.eta * contraction;
  out.entropy_production = out.xi_m / (mp.thermal_or_default().density * th.theta);
  return out;
}

double check_dissipation_identity(const SymTensor3& T, const SymTensor3& Bp, const SymTensor3& BG,
                                  const SymTensor3& DG, const MaterialParams& mp) {
  const double xi = dissipation_rate(Bp, DG, mp).xi_m;
  // The pressure drops out against a traceless D_G; contracting with the
  // deviator keeps |p| from amplifying the rounding left in tr D_G.
  const SymTensor3 devDG = DG - (DG.trace() / 3.0) * SymTensor3::identity();
  const double working = (T - mp.mu_g_bar * BG).dot(devDG);
  return std::abs(working - xi) / std::max(xi, kDissipationFloor);
}

}  // namespace polyvisc::material
