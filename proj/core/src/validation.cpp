#include "polyvisc/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "polyvisc/errors.hpp"

namespace polyvisc::validation {

namespace {

using evolution::Trajectory;
using kinematics::MotionProtocol;
using tensors::SymTensor3;

MaterialParams pmr15() {
  MaterialParams mp;
  mp.mu_p_bar = 3.76e8;
  mp.mu_g_bar = 4.42e8;
  mp.eta = 6.22e12;
  return mp;
}

MaterialParams hfpe285() {
  MaterialParams mp;
  mp.mu_p_bar = 4.79e8;
  mp.mu_g_bar = 1.43e9;
  mp.eta = 3.95e13;
  return mp;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

CheckResult timed(const std::string& name, double tolerance, const std::function<CheckResult()>& body) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r.passed = false;
    r.value = NAN;
    r.detail = std::string("exception: ") + e.what();
  }
  r.name = name;
  r.tolerance = tolerance;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

CheckResult upper_bound(double value, double tolerance, std::string detail = {}) {
  CheckResult r;
  r.value = value;
  r.passed = std::isfinite(value) && value <= tolerance;
  r.detail = std::move(detail);
  return r;
}

}  // namespace

EquivalenceReport replay_creep(double stress, double duration, const MaterialParams& mp,
                               const uniaxial::CreepOptions& creep, const evolution::DriveOptions& drive) {
  if (stress == 0.0) throw ConfigError("replay_creep: stress must be nonzero");
  EquivalenceReport rep{0.0, 0.0, uniaxial::simulate_creep({{stress, duration}}, mp, creep), {}};
  const double B = rep.curve.segments().front().B;
  const uniaxial::StretchRate law = creep.rate_law ? creep.rate_law : uniaxial::StretchRate(uniaxial::lambda_rate);

  const auto& curve = rep.curve;
  const auto stretch = [&curve](double t) { return curve.stretch_at(t); };
  const auto rate = [&curve, &law, &mp, B](double t) { return law(curve.stretch_at(t), B, 0.0, mp); };
  const auto protocol = MotionProtocol::uniaxial(stretch, rate, 0.0, duration);

  evolution::EvolutionState x0;
  x0.B_p = SymTensor3::diag(B, 1.0 / std::sqrt(B), 1.0 / std::sqrt(B));
  rep.trajectory = evolution::drive(protocol, mp, x0, drive);

  const double norm = x0.B_p.norm();
  for (const auto& s : rep.trajectory.samples) {
    rep.max_bp_error = std::max(rep.max_bp_error, (s.B_p - x0.B_p).norm() / norm);
    rep.max_stress_error = std::max(rep.max_stress_error, std::abs(s.T_axial - stress) / std::abs(stress));
  }
  return rep;
}

double sls_deviation(double stress, const MaterialParams& mp, double horizon, const uniaxial::CreepOptions& creep) {
  const auto curve = uniaxial::simulate_creep({{stress, horizon}}, mp, creep);
  double worst = 0.0;
  for (const auto& s : curve.samples()) {
    const double ref = uniaxial::sls_creep_analytic(stress, mp, s.t);
    worst = std::max(worst, std::abs(s.strain - ref) / std::abs(ref));
  }
  return worst;
}

std::vector<Trajectory> reference_trajectories(bool quick) {
  const MaterialParams mp = pmr15();
  const double tauCreep = mp.creep_time_constant();
  std::vector<Trajectory> out;
  out.push_back(replay_creep(1.0e7, quick ? 2.0 * tauCreep : 10.0 * tauCreep, mp).trajectory);

  const double tauRelax = mp.eta / (2.0 * (mp.mu_p_bar + mp.mu_g_bar));
  out.push_back(evolution::relax(1.02, mp, (quick ? 3.0 : 10.0) * tauRelax));
  if (quick) return out;

  out.push_back(evolution::drive(MotionProtocol::constant_strain_rate(2e-6, 0.0, 2e4), mp, {}));
  out.push_back(evolution::drive(
      MotionProtocol::simple_shear([](double t) { return 1e-5 * t; }, [](double) { return 1e-5; }, 0.0, 2e4),
      hfpe285(), {}));
  MaterialParams maxwell = mp;
  maxwell.mu_g_bar = 0.0;
  out.push_back(evolution::relax(1.01, maxwell, 5.0 * mp.eta / (2.0 * mp.mu_p_bar)));
  return out;
}

std::vector<CheckResult> run_suite(const SuiteOptions& opts) {
  std::vector<CheckResult> results;
  std::vector<Trajectory> trajectories;

  results.push_back(timed("trajectories", 0.0, [&] {
    trajectories = reference_trajectories(opts.quick);
    CheckResult r;
    r.passed = true;
    r.value = static_cast<double>(trajectories.size());
    r.detail = std::to_string(trajectories.size()) + " reference trajectories integrated";
    return r;
  }));
  const auto over = [&trajectories](double (Trajectory::*stat)() const, bool maximum) {
    double v = maximum ? 0.0 : INFINITY;
    for (const auto& tr : trajectories) v = maximum ? std::max(v, (tr.*stat)()) : std::min(v, (tr.*stat)());
    return v;
  };

  results.push_back(timed("det_drift", 1e-8, [&] {
    return upper_bound(over(&Trajectory::max_det_drift, true), 1e-8, "max |det B_p - 1|");
  }));
  results.push_back(timed("dissipation_positive", 0.0, [&] {
    CheckResult r;
    r.value = over(&Trajectory::min_xi_m, false);
    r.passed = !trajectories.empty() && r.value >= 0.0;
    r.detail = "min xi_m over accepted steps = " + sci(r.value);
    return r;
  }));
  results.push_back(timed("dissipation_identity", 1e-8, [&] {
    return upper_bound(over(&Trajectory::max_identity_residual, true), 1e-8,
                       "max relative residual of (T - mu_G B_G) . D_G = xi_m");
  }));
  results.push_back(timed("trace_DG", 1e-12, [&] {
    return upper_bound(over(&Trajectory::max_abs_trace_DG, true), 1e-12, "max |tr D_G| (1/s)");
  }));

  results.push_back(timed("scalar_equivalence", 1e-6, [&] {
    uniaxial::CreepOptions creep;
    creep.rate_law = opts.rate_law;
    const MaterialParams mp = pmr15();
    const double horizon = opts.quick ? 2.0 * mp.creep_time_constant() : 7e4;
    const auto rep = replay_creep(1.0e7, horizon, mp, creep);
    CheckResult r = upper_bound(std::max(rep.max_bp_error, rep.max_stress_error), 1e-6);
    r.detail = "B_p error " + sci(rep.max_bp_error) + ", T11 error " + sci(rep.max_stress_error);
    return r;
  }));

  results.push_back(timed("sls_limit", 5e-3, [&] {
    uniaxial::CreepOptions creep;
    creep.rate_law = opts.rate_law;
    const MaterialParams mp = opts.quick ? pmr15() : hfpe285();
    const double dev = sls_deviation(1e-3 * mp.mu_p_bar, mp, 10.0 * mp.creep_time_constant(), creep);
    return upper_bound(dev, 5e-3, "max relative deviation from the linearized solution");
  }));
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return !results.empty() &&
         std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

}  // namespace polyvisc::validation
