#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "polyvisc/material.hpp"
#include "polyvisc/odesolve.hpp"

namespace polyvisc::uniaxial {

using material::MaterialParams;

/// Constant axial Cauchy stress held for `duration` seconds.
struct CreepSegment {
  double stress = 0.0;    ///< Pa
  double duration = 0.0;  ///< s
};

struct CreepSample {
  double t;        ///< s
  double strain;   ///< logarithmic unless the curve was built with engineering strain
};

struct SegmentMark {
  std::size_t index;
  double start;   ///< s
  double stress;  ///< Pa
  double B;       ///< elastic stretch measure B_p11 held in the segment
};

/// Stretch-rate law d(lambda)/dt = f(lambda, B, dB/dt, params).
using StretchRate = std::function<double(double lambda, double B, double Bdot, const MaterialParams&)>;

struct CreepOptions {
  double rtol = 1e-8;
  double atol = 1e-12;
  bool engineering_strain = false;
  /// Replaces the built-in stretch-rate law (negative controls in validation).
  StretchRate rate_law;
};

/// Sampled creep/recovery response plus the dense output it came from.
class CreepCurve {
 public:
  const std::vector<CreepSample>& samples() const { return samples_; }
  const std::vector<SegmentMark>& segments() const { return marks_; }
  double end_time() const { return end_; }

  /// Axial stretch at t. At a segment boundary the post-jump value is returned.
  double stretch_at(double t) const;
  /// ln(stretch), or stretch - 1 for engineering curves.
  double strain_at(double t) const;
  /// Segment index owning time t.
  std::size_t segment_at(double t) const;
  bool engineering() const { return engineering_; }

 private:
  friend CreepCurve simulate_creep(const std::vector<CreepSegment>&, const MaterialParams&,
                                   const CreepOptions&);
  double to_strain(double stretch) const;

  std::vector<CreepSample> samples_;
  std::vector<SegmentMark> marks_;
  std::vector<std::shared_ptr<const ode::OdeSolution>> dense_;
  double end_ = 0.0;
  bool engineering_ = false;
};

/// Unique B > 0 with mu_p_bar (B - B^{-1/2}) = stress.
double solve_B(double stress, double muPBar);

/// Stretch rate for uniaxial creep at elastic measure B and its rate.
double lambda_rate(double lambda, double B, double Bdot, const MaterialParams& mp);

CreepCurve simulate_creep(const std::vector<CreepSegment>& segments, const MaterialParams& mp,
                          const CreepOptions& opts = {});

/// Small-strain standard-linear-solid creep strain under constant stress;
/// linear creep when mu_g_bar = 0.
double sls_creep_analytic(double stress, const MaterialParams& mp, double t);

/// True when |stress| > 0.05 mu_p_bar, where the linearized response is no
/// longer a reliable proxy.
bool sls_outside_small_strain(double stress, const MaterialParams& mp);

/// Equilibrium stretch under constant stress (root of the stretch-rate law
/// with B fixed); requires mu_g_bar > 0.
double equilibrium_stretch(double stress, const MaterialParams& mp);

}  // namespace polyvisc::uniaxial
