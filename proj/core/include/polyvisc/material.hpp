#pragma once

#include <array>
#include <optional>

#include "polyvisc/tensors.hpp"

namespace polyvisc::material {

using tensors::SymTensor3;

/// Affine temperature law mu(theta) = (mu0 - mu1 theta) / theta_s.
struct AffineModuli {
  double mu_p0 = 0.0;  ///< Pa
  double mu_p1 = 0.0;  ///< Pa/K
  double mu_g0 = 0.0;  ///< Pa
  double mu_g1 = 0.0;  ///< Pa/K
};

/// Coefficients of the thermal part of the free energy. The defaults are
/// placeholders that are not fit to any data; they never enter the
/// mechanical response.
struct ThermalParams {
  double theta_s = 293.15;    ///< K
  double c1 = 0.0;            ///< J/(kg K^2)
  double c2 = 1000.0;         ///< J/(kg K)
  double A_s = 0.0;           ///< J/kg
  double B_s = 0.0;           ///< J/(kg K)
  double conductivity = 0.2;  ///< W/(m K)
  double density = 1320.0;    ///< kg/m^3
  std::optional<AffineModuli> moduli;
};

/// Isothermal working set plus an optional thermal block.
struct MaterialParams {
  double mu_p_bar = 0.0;  ///< Pa, spring carrying the instantaneous response
  double mu_g_bar = 0.0;  ///< Pa, zero gives the Maxwell-fluid limit
  double eta = 0.0;       ///< Pa s
  std::optional<ThermalParams> thermal;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
  const ThermalParams& thermal_or_default() const;
  /// Copy with mu_p_bar, mu_g_bar taken from the affine law at theta (K).
  /// Without an affine law the isothermal values are kept.
  MaterialParams at_temperature(double theta) const;
  /// Creep time constant eta / (2 mu_g_bar) of the small-strain limit.
  double creep_time_constant() const;
};

struct ThermalState {
  double theta = 293.15;                       ///< K
  std::array<double, 3> grad_theta{0, 0, 0};   ///< K/m
};

/// (mu0 - mu1 theta) / theta_s; throws ConfigError if the result is <= 0.
double mu_bar(double mu0, double mu1, double theta, double thetaS);

double helmholtz(const SymTensor3& Bp, const SymTensor3& BG, const ThermalState& th,
                 const MaterialParams& mp);
double entropy(const SymTensor3& Bp, const SymTensor3& BG, const ThermalState& th,
               const MaterialParams& mp);
double internal_energy(const SymTensor3& Bp, const SymTensor3& BG, const ThermalState& th,
                       const MaterialParams& mp);
double heat_capacity(const ThermalState& th, const MaterialParams& mp);

struct HeatFlux {
  std::array<double, 3> q{0, 0, 0};  ///< W/m^2
  double conduction_dissipation = 0.0;  ///< k |grad theta|^2 / theta
};

HeatFlux heat_flux(const ThermalState& th, const MaterialParams& mp);

/// T = p I + mu_p_bar B_p
SymTensor3 stress(const SymTensor3& Bp, double p, const MaterialParams& mp);

/// Pressure making the traction on the plane with unit normal n vanish in
/// the n direction: p = -mu_p_bar n.B_p.n
double traction_free_pressure(const SymTensor3& Bp, const std::array<double, 3>& n,
                              const MaterialParams& mp);
/// Pressure for the convention tr T = 0.
double traceless_pressure(const SymTensor3& Bp, const MaterialParams& mp);

struct Dissipation {
  double xi_m = 0.0;                ///< W/m^3
  double entropy_production = 0.0;  ///< xi_m / (rho theta)
};

/// xi_m = eta D_G . (B_p D_G)
Dissipation dissipation_rate(const SymTensor3& Bp, const SymTensor3& DG, const MaterialParams& mp,
                             const ThermalState& th = {});

/// |(T - mu_g_bar B_G) . dev D_G - xi_m| / max(xi_m, 1e-30).
double check_dissipation_identity(const SymTensor3& T, const SymTensor3& Bp, const SymTensor3& BG,
                                  const SymTensor3& DG, const MaterialParams& mp);

}  // namespace polyvisc::material
