#pragma once

#include <string>
#include <vector>

#include "polyvisc/evolution.hpp"
#include "polyvisc/uniaxial.hpp"

namespace polyvisc::validation {

using material::MaterialParams;

/// Replays a scalar creep history through the tensor integrator.
struct EquivalenceReport {
  double max_bp_error = 0.0;      ///< max ||B_p - diag(B, B^-1/2, B^-1/2)|| / ||diag(...)||
  double max_stress_error = 0.0;  ///< max |T11 - stress| / |stress|
  uniaxial::CreepCurve curve;
  evolution::Trajectory trajectory;
};

/// Simulates constant-stress creep with the scalar model, prescribes the
/// resulting stretch history as a uniaxial motion (rate taken from the same
/// stretch-rate law) and compares the tensor response with the scalar one.
EquivalenceReport replay_creep(double stress, double duration, const MaterialParams& mp,
                               const uniaxial::CreepOptions& creep = {},
                               const evolution::DriveOptions& drive = {});

/// Max relative deviation of simulate_creep from sls_creep_analytic over
/// [0, horizon], sampled on the curve mesh.
double sls_deviation(double stress, const MaterialParams& mp, double horizon,
                     const uniaxial::CreepOptions& creep = {});

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  double seconds = 0.0;
  std::string detail;
};

struct SuiteOptions {
  /// Sub-second subset: shorter horizons, fewer trajectories.
  bool quick = false;
  /// Overrides the scalar stretch-rate law (negative controls).
  uniaxial::StretchRate rate_law;
};

/// Det drift, dissipation positivity, dissipation identity residual, trace
/// of D_G, general-vs-scalar equivalence and SLS-limit match.
std::vector<CheckResult> run_suite(const SuiteOptions& opts = {});

bool all_passed(const std::vector<CheckResult>& results);

/// Trajectories the thermodynamic checks run over: creep replay, stress
/// relaxation, constant-rate stretching and simple shear.
std::vector<evolution::Trajectory> reference_trajectories(bool quick);

}  // namespace polyvisc::validation
