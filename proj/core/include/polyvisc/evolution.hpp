#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "polyvisc/kinematics.hpp"
#include "polyvisc/material.hpp"
#include "polyvisc/odesolve.hpp"

namespace polyvisc::evolution {

using kinematics::MotionProtocol;
using material::MaterialParams;
using tensors::SymTensor3;
using tensors::Tensor3;

/// Left Cauchy-Green tensor of the elastic map from the natural
/// configuration; SPD and unimodular along a trajectory.
struct EvolutionState {
  SymTensor3 B_p = SymTensor3::identity();
};

/// How the incompressibility pressure is fixed when reporting stress.
enum class PressureConvention {
  LateralTractionFree,  ///< uniaxial: T22 = T33 = 0
  Traceless,            ///< tr T = 0 (shear)
};

struct TrajectorySample {
  double t = 0.0;
  Tensor3 F;
  SymTensor3 B_p;
  SymTensor3 T;                  ///< Pa
  double pressure = 0.0;         ///< Pa
  double epsilon_axial = 0.0;    ///< ln of the stretch along the loading axis
  double T_axial = 0.0;          ///< Pa, normal stress along the loading axis
  double det_Bp = 1.0;
  double xi_m = 0.0;             ///< W/m^3
  double identity_residual = 0.0;
  double trace_DG = 0.0;         ///< 1/s
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  PressureConvention convention = PressureConvention::LateralTractionFree;
  ode::StepStats stats;
  /// Dense B_p history (six canonical components).
  std::shared_ptr<const ode::OdeSolution> dense;

  SymTensor3 B_p_at(double t) const;
  double max_det_drift() const;
  double max_identity_residual() const;
  double max_abs_trace_DG() const;
  double min_xi_m() const;
};

struct DriveOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  /// Abort threshold on |det B_p - 1|.
  double det_abort = 1e-6;
  /// Rescale B_p to unit determinant after every accepted step.
  bool project_unimodular = false;
};

/// Integration failure; carries the trajectory up to the last accepted step.
class DriveError : public NumericalError {
 public:
  DriveError(const std::string& what, Trajectory partial)
      : NumericalError(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

/// Rate of deformation of the natural configuration. The Lagrange multiplier
/// enforcing tr D_G = 0 is folded into the right-hand side before the
/// Sylvester solve B_p D_G + D_G B_p = (2/eta)(c I + mu_p B_p - mu_g B_G).
SymTensor3 dG_rate(const SymTensor3& Bp, const SymTensor3& BG, const MaterialParams& mp);
SymTensor3 dG_rate(const tensors::SpectralDecomp& Bp, const SymTensor3& BG, const MaterialParams& mp);

/// dB_p/dt = L B_p + B_p L^T - 2 V D_G V with V = B_p^{1/2}; B is the total
/// left Cauchy-Green tensor of the current motion.
SymTensor3 bp_rate(const SymTensor3& Bp, const SymTensor3& B, const Tensor3& L, const MaterialParams& mp);

/// Integrates B_p under a prescribed motion starting from x0.
Trajectory drive(const MotionProtocol& protocol, const MaterialParams& mp, const EvolutionState& x0,
                 const DriveOptions& opts = {});

/// Instantaneous elastic stretch to lambdaHold at t = 0, then held.
Trajectory relax(double lambdaHold, const MaterialParams& mp, double holdTime,
                 const DriveOptions& opts = {});

/// Evaluates stress and dissipation diagnostics at one state.
TrajectorySample evaluate_state(const MotionProtocol& protocol, const MaterialParams& mp, double t,
                                const SymTensor3& Bp);

}  // namespace polyvisc::evolution
