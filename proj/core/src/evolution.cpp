#include "polyvisc/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polyvisc/errors.hpp"

namespace polyvisc::evolution {

namespace {

SymTensor3 from_span(std::span<const double> y) {
  return SymTensor3({y[0], y[1], y[2], y[3], y[4], y[5]});
}

std::array<double, 3> axis(const Tensor3& q, std::size_t column) {
  return {q(0, column), q(1, column), q(2, column)};
}

double project(const SymTensor3& a, const std::array<double, 3>& n) {
  double v = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) v += n[i] * a(i, j) * n[j];
  return v;
}

Trajectory build_trajectory(const MotionProtocol& protocol, const MaterialParams& mp,
                            const ode::OdeSolution& sol) {
  Trajectory traj;
  traj.convention = protocol.is_axial() ? PressureConvention::LateralTractionFree
                                        : PressureConvention::Traceless;
  traj.stats = sol.stats();
  traj.samples.reserve(sol.size());
  for (std::size_t i = 0; i < sol.size(); ++i)
    traj.samples.push_back(evaluate_state(protocol, mp, sol.times()[i], from_span(sol.state(i))));
  traj.dense = std::make_shared<const ode::OdeSolution>(sol);
  return traj;
}

}  // namespace

SymTensor3 Trajectory::B_p_at(double t) const {
  const auto y = dense->at(t);
  return from_span(y);
}

double Trajectory::max_det_drift() const {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, std::abs(s.det_Bp - 1.0));
  return m;
}

double Trajectory::max_identity_residual() const {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, s.identity_residual);
  return m;
}

double Trajectory::max_abs_trace_DG() const {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, std::abs(s.trace_DG));
  return m;
}

double Trajectory::min_xi_m() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) m = std::min(m, s.xi_m);
  return m;
}

SymTensor3 dG_rate(const tensors::SpectralDecomp& bp, const SymTensor3& BG, const MaterialParams& mp) {
  if (!tensors::is_spd(bp)) throw DomainError("dG_rate: B_p is not symmetric positive definite");
  const SymTensor3 BpInv = bp.map([](double x) { return 1.0 / x; });
  const SymTensor3 Bp = bp.map([](double x) { return x; });
  const double multiplier = (mp.mu_g_bar * BpInv.dot(BG) - 3.0 * mp.mu_p_bar) / BpInv.trace();
  const SymTensor3 rhs =
      (2.0 / mp.eta) * (multiplier * SymTensor3::identity() + mp.mu_p_bar * Bp - mp.mu_g_bar * BG);
  return tensors::sylvester_spd(bp, rhs);
}

SymTensor3 dG_rate(const SymTensor3& Bp, const SymTensor3& BG, const MaterialParams& mp) {
  if (!tensors::is_spd(BG)) throw DomainError("dG_rate: B_G is not symmetric positive definite");
  return dG_rate(tensors::eig_sym(Bp), BG, mp);
}

SymTensor3 bp_rate(const SymTensor3& Bp, const SymTensor3& B, const Tensor3& L, const MaterialParams& mp) {
  const auto maps = kinematics::natural_maps(B, Bp);
  const SymTensor3 DG = dG_rate(maps.Bp_spectral, maps.B_G, mp);
  return tensors::upper_convected(L, Bp) - 2.0 * tensors::sandwich(maps.V, DG);
}

TrajectorySample evaluate_state(const MotionProtocol& protocol, const MaterialParams& mp, double t,
                                const SymTensor3& Bp) {
  TrajectorySample s;
  s.t = t;
  s.F = protocol.F(t);
  s.B_p = Bp;
  s.det_Bp = Bp.det();

  const SymTensor3 B = tensors::gram(s.F);
  const auto maps = kinematics::natural_maps(B, Bp);
  const SymTensor3 DG = dG_rate(maps.Bp_spectral, maps.B_G, mp);

  const Tensor3& q = protocol.rotation();
  const auto loadAxis = axis(q, 0);
  s.pressure = protocol.is_axial() ? material::traction_free_pressure(Bp, axis(q, 1), mp)
                                   : material::traceless_pressure(Bp, mp);
  s.T = material::stress(Bp, s.pressure, mp);
  s.T_axial = project(s.T, loadAxis);
  s.epsilon_axial = 0.5 * std::log(project(B, loadAxis));
  s.xi_m = material::dissipation_rate(Bp, DG, mp).xi_m;
  s.identity_residual = material::check_dissipation_identity(s.T, Bp, maps.B_G, DG, mp);
  s.trace_DG = DG.trace();
  return s;
}

Trajectory drive(const MotionProtocol& protocol, const MaterialParams& mp, const EvolutionState& x0,
                 const DriveOptions& opts) {
  mp.validate();
  if (!tensors::is_spd(x0.B_p)) throw ConfigError("drive: initial B_p must be SPD");
  if (std::abs(x0.B_p.det() - 1.0) > opts.det_abort)
    throw ConfigError("drive: initial B_p must be unimodular");

  ode::OdeProblem problem;
  problem.t0 = protocol.start();
  problem.t1 = protocol.end();
  problem.y0.assign(x0.B_p.data().begin(), x0.B_p.data().end());
  problem.rtol = opts.rtol;
  problem.atol = opts.atol;
  problem.rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
    const SymTensor3 rate = bp_rate(from_span(y), protocol.B(t), protocol.L(t), mp);
    std::copy(rate.data().begin(), rate.data().end(), dy.begin());
  };
  problem.post_step = [&opts](double t, std::span<double> y) {
    const double det = from_span(y).det();
    if (opts.project_unimodular) {
      const double scale = 1.0 / std::cbrt(det);
      for (auto& v : y) v *= scale;
      return true;
    }
    if (std::abs(det - 1.0) > opts.det_abort)
      throw NumericalError("det B_p drifted to " + std::to_string(det) + " at t = " + std::to_string(t));
    return false;
  };

  try {
    return build_trajectory(protocol, mp, ode::integrate(problem));
  } catch (const ode::OdeError& e) {
    throw DriveError(e.what(), e.partial().size() > 1 ? build_trajectory(protocol, mp, e.partial())
                                                       : Trajectory{});
  }
}

Trajectory relax(double lambdaHold, const MaterialParams& mp, double holdTime, const DriveOptions& opts) {
  if (!(lambdaHold > 0.0)) throw DomainError("relax: stretch must be positive");
  EvolutionState x0;
  x0.B_p = SymTensor3::diag(lambdaHold * lambdaHold, 1.0 / lambdaHold, 1.0 / lambdaHold);
  return drive(MotionProtocol::hold(lambdaHold, 0.0, holdTime), mp, x0, opts);
}

}  // namespace polyvisc::evolution
