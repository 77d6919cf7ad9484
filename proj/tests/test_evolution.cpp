#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "polyvisc/errors.hpp"
#include "polyvisc/evolution.hpp"
#include "polyvisc/uniaxial.hpp"
#include "polyvisc/validation.hpp"
#include "support.hpp"

using namespace polyvisc;
using namespace polyvisc::evolution;
using kinematics::MotionProtocol;
using polyvisc::ts::fro;

namespace {

MaterialParams pmr15() { return {3.76e8, 4.42e8, 6.22e12, std::nullopt}; }

double oracle_rate(double lam, double B, double Bdot, const MaterialParams& mp) {
  const double inner = (mp.mu_g_bar * (lam * lam * lam + 2 * B * B * B) - 3 * mp.mu_p_bar * B * B * lam) /
                       (B * lam * (1 + 2 * std::pow(B, 1.5)));
  return lam * (Bdot / (2 * B) - (mp.mu_g_bar * lam * lam / B - mp.mu_p_bar * B - inner) / (mp.eta * B));
}

std::array<double, 3> eigenvalues(const SymTensor3& a) { return tensors::eig_sym(a).values; }

// Rate of the held-stretch relaxation linearized by finite differences of
// bp_rate: for B_p = diag(b, b^-1/2, b^-1/2) the axial component obeys
// d(b)/dt ~ k (b - b_eq) near equilibrium.
double relaxation_rate_fd(const MaterialParams& mp, double lam) {
  const auto B = SymTensor3::diag(lam * lam, 1 / lam, 1 / lam);
  const auto rate = [&](double b) {
    return bp_rate(SymTensor3::diag(b, 1 / std::sqrt(b), 1 / std::sqrt(b)), B, Tensor3::zero(), mp)(0, 0);
  };
  // Equilibrium axial b by bisection, then the slope there.
  const double beq = ts::bisect(rate, 1.0, lam * lam);
  const double h = 1e-7;
  return (rate(beq + h) - rate(beq - h)) / (2 * h);
}

}  // namespace

TEST(DGRate, EquilibriumBalanceGivesZero) {
  const auto mp = pmr15();
  std::mt19937_64 rng(41);
  for (int n = 0; n < 100; ++n) {
    const auto bp = ts::random_unimodular_spd(rng);
    const double c0 = 0.1 * mp.mu_p_bar;
    const auto bg = (1.0 / mp.mu_g_bar) * (c0 * SymTensor3::identity() + mp.mu_p_bar * bp);
    EXPECT_LE(fro(dG_rate(bp, bg, mp)), 1e-13 * mp.mu_p_bar / mp.eta);
  }
}

TEST(DGRate, RestState) {
  const auto id = SymTensor3::identity();
  EXPECT_LE(fro(dG_rate(id, id, pmr15())), 1e-25);
}

TEST(DGRate, UniaxialClosedForm) {
  const auto mp = pmr15();
  for (double lam : {0.97, 1.01, 1.05}) {
    for (double B : {0.99, 1.02, 1.04}) {
      const auto bp = SymTensor3::diag(B, 1 / std::sqrt(B), 1 / std::sqrt(B));
      const auto bg = SymTensor3::diag(lam * lam / B, std::sqrt(B) / lam, std::sqrt(B) / lam);
      const auto dg = dG_rate(bp, bg, mp);
      for (double Bdot : {0.0, 3e-5, -1e-4}) {
        const double lamDot = oracle_rate(lam, B, Bdot, mp);
        const double d11 = -0.5 * (Bdot / B - 2 * lamDot / lam);
        const double d22 = -0.5 * (lamDot / lam - Bdot / (2 * B));
        EXPECT_NEAR(dg(0, 0), d11, 1e-12 * std::max(std::abs(d11), 1e-6));
        EXPECT_NEAR(dg(1, 1), d22, 1e-12 * std::max(std::abs(d11), 1e-6));
        EXPECT_NEAR(dg(2, 2), d22, 1e-12 * std::max(std::abs(d11), 1e-6));
      }
      EXPECT_EQ(dg(0, 1), 0.0);
    }
  }
}

TEST(DGRate, TracelessOverRandomPairs) {
  const auto mp = pmr15();
  std::mt19937_64 rng(42);
  for (int n = 0; n < 1000; ++n) {
    const auto bp = ts::random_spd(rng, 2.0);
    const auto bg = ts::random_spd(rng, 2.0);
    const auto dg = dG_rate(bp, bg, mp);
    EXPECT_LE(std::abs(dg.trace()), 1e-12);
    EXPECT_LE(std::abs(dg.trace()), 1e-12 * fro(dg));
  }
}

TEST(DGRate, RejectsNonSpd) {
  EXPECT_THROW(dG_rate(SymTensor3::diag(1, -1, -1), SymTensor3::identity(), pmr15()), DomainError);
  EXPECT_THROW(dG_rate(SymTensor3::identity(), SymTensor3::diag(1, 0, 1), pmr15()), DomainError);
}

TEST(BpRate, FrozenNaturalConfiguration) {
  const Tensor3 l({0.1, 0.2, 0.0, -0.3, 0.05, 0.1, 0.0, 0.4, -0.15});
  const auto id = SymTensor3::identity();
  const auto rate = bp_rate(id, id, l, pmr15());
  EXPECT_LE(fro(ts::full(rate) - (l + l.transpose())), 1e-15);
}

TEST(BpRate, PureRelaxation) {
  const auto mp = pmr15();
  std::mt19937_64 rng(43);
  const auto bp = ts::random_unimodular_spd(rng);
  const auto b = ts::random_unimodular_spd(rng);
  const auto v = tensors::sqrt_spd(bp);
  const auto vinv = v.inverse();
  const auto bgFull = ts::matmul(ts::matmul(ts::full(vinv), ts::full(b)), ts::full(vinv));
  const SymTensor3 bg({bgFull(0, 0), bgFull(1, 1), bgFull(2, 2), bgFull(0, 1), bgFull(1, 2), bgFull(0, 2)});
  const auto dg = dG_rate(bp, bg, mp);
  const auto expected = -2.0 * ts::matmul(ts::matmul(ts::full(v), ts::full(dg)), ts::full(v));
  EXPECT_LE(fro(ts::full(bp_rate(bp, b, Tensor3::zero(), mp)) - expected), 1e-12 * fro(expected));
}

TEST(BpRate, UniaxialCreepStateIsStationary) {
  const auto mp = pmr15();
  const double B = uniaxial::solve_B(1e7, mp.mu_p_bar);
  for (double lam : {std::sqrt(B), 1.012, 1.015}) {
    const double lamDot = oracle_rate(lam, B, 0.0, mp);
    const auto bp = SymTensor3::diag(B, 1 / std::sqrt(B), 1 / std::sqrt(B));
    const auto rate = bp_rate(bp, SymTensor3::diag(lam * lam, 1 / lam, 1 / lam), kinematics::uniaxial_L(lam, lamDot), mp);
    EXPECT_LE(fro(rate), 1e-12 * std::abs(lamDot));
  }
}

TEST(BpRate, PreservesDeterminantInRateForm) {
  const auto mp = pmr15();
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(-1e-4, 1e-4);
  for (int n = 0; n < 500; ++n) {
    const auto bp = ts::random_unimodular_spd(rng);
    const auto b = ts::random_unimodular_spd(rng);
    std::array<double, 9> lc{};
    for (auto& x : lc) x = u(rng);
    const double tr = (lc[0] + lc[4] + lc[8]) / 3.0;
    lc[0] -= tr, lc[4] -= tr, lc[8] -= tr;
    const auto rate = bp_rate(bp, b, Tensor3(lc), mp);
    const auto prod = ts::matmul(ts::full(bp.inverse()), ts::full(rate));
    EXPECT_LE(std::abs(prod.trace()), 1e-10 * std::max(fro(rate), 1e-12));
  }
}

TEST(Drive, RestStateStaysAtRest) {
  const auto traj = drive(MotionProtocol::hold(1.0, 0.0, 1e5), pmr15(), {});
  for (const auto& s : traj.samples) {
    EXPECT_LE(fro(s.B_p - SymTensor3::identity()), 1e-15);
    EXPECT_NEAR(s.T_axial, 0.0, 1e-6);
  }
}

TEST(Drive, StepStretchRelaxation) {
  const auto mp = pmr15();
  const double lam = 1.01;
  const double tauR = mp.eta / (2 * (mp.mu_p_bar + mp.mu_g_bar));
  const auto traj = relax(lam, mp, 20 * tauR);
  const double eq = 3 * mp.mu_p_bar * mp.mu_g_bar / (mp.mu_p_bar + mp.mu_g_bar) * std::log(lam);
  for (std::size_t i = 1; i < traj.samples.size(); ++i)
    EXPECT_LE(traj.samples[i].T_axial, traj.samples[i - 1].T_axial + 1e-6);
  EXPECT_NEAR(traj.samples.back().T_axial, eq, 0.02 * eq);
  // Lateral traction-free convention.
  EXPECT_NEAR(traj.samples.back().T(1, 1), 0.0, 1e-6 * mp.mu_p_bar);
  EXPECT_EQ(traj.convention, PressureConvention::LateralTractionFree);
}

TEST(Drive, SmallStrainRelaxationRatioAndTime) {
  const auto mp = pmr15();
  const double lam = 1.0005;
  const double tauR = mp.eta / (2 * (mp.mu_p_bar + mp.mu_g_bar));
  // Derived rate matches finite differences of the full right-hand side.
  EXPECT_NEAR(-1.0 / relaxation_rate_fd(mp, lam), tauR, 2e-3 * tauR);

  const auto traj = relax(lam, mp, 30 * tauR);
  const double t0 = traj.samples.front().T_axial;
  const double tInf = traj.samples.back().T_axial;
  EXPECT_NEAR(tInf / t0, mp.mu_g_bar / (mp.mu_p_bar + mp.mu_g_bar), 2e-3);
  const auto at = [&](double t) {
    return evaluate_state(MotionProtocol::hold(lam, 0.0, 30 * tauR), mp, t, traj.B_p_at(t)).T_axial;
  };
  EXPECT_NEAR((at(tauR) - tInf) / (t0 - tInf), std::exp(-1.0), 5e-3);
}

TEST(Drive, MaxwellRelaxationDecaysToZero) {
  MaterialParams mp = pmr15();
  mp.mu_g_bar = 0.0;
  const double lam = 1.0005;
  const double tau = mp.eta / (2 * mp.mu_p_bar);
  EXPECT_NEAR(-1.0 / relaxation_rate_fd(mp, lam), tau, 2e-3 * tau);
  const auto traj = relax(lam, mp, 20 * tau);
  const double t0 = traj.samples.front().T_axial;
  EXPECT_LE(std::abs(traj.samples.back().T_axial), 1e-6 * t0);
  const auto at = [&](double t) {
    return evaluate_state(MotionProtocol::hold(lam, 0.0, 20 * tau), mp, t, traj.B_p_at(t)).T_axial;
  };
  EXPECT_NEAR(at(tau) / t0, std::exp(-1.0), 5e-3);
}

TEST(Drive, ReplaysScalarCreep) {
  const auto mp = pmr15();
  const auto rep = validation::replay_creep(1e7, 7e4, mp);
  EXPECT_LE(rep.max_bp_error, 1e-6);
  EXPECT_LE(rep.max_stress_error, 1e-6);
  EXPECT_GT(rep.trajectory.samples.size(), 2u);
}

TEST(Drive, ReplayDetectsWrongStretchLaw) {
  uniaxial::CreepOptions opts;
  opts.rate_law = [](double l, double B, double Bd, const MaterialParams& mp) {
    return -uniaxial::lambda_rate(l, B, Bd, mp);
  };
  // A compressive history cannot reach a stretch below zero within 2 tau.
  const auto mp = pmr15();
  const auto rep = validation::replay_creep(1e7, 2 * mp.creep_time_constant(), mp, opts);
  EXPECT_GT(std::max(rep.max_bp_error, rep.max_stress_error), 1e-3);
}

TEST(Drive, TrajectoryInvariants) {
  for (const auto& traj : validation::reference_trajectories(false)) {
    for (std::size_t i = 1; i < traj.samples.size(); ++i) EXPECT_GT(traj.samples[i].t, traj.samples[i - 1].t);
    EXPECT_GE(traj.min_xi_m(), 0.0);
    EXPECT_LE(traj.max_identity_residual(), 1e-8);
    EXPECT_LE(traj.max_det_drift(), 1e-8);
    EXPECT_LE(traj.max_abs_trace_DG(), 1e-12);
  }
}

TEST(Drive, RotationEquivariance) {
  MaterialParams mp{4.79e8, 1.43e9, 3.95e13, std::nullopt};
  std::mt19937_64 rng(45);
  const auto q = ts::random_rotation(rng);
  DriveOptions opts;
  opts.rtol = 1e-12;
  opts.atol = 1e-14;
  const auto shear =
      MotionProtocol::simple_shear([](double t) { return 2e-5 * t; }, [](double) { return 2e-5; }, 0.0, 1e4);
  const auto stretch = MotionProtocol::constant_strain_rate(3e-6, 0.0, 1e4);
  for (const auto& base : {shear, stretch}) {
    const auto rot = base.rotated(q);
    const auto a = drive(base, mp, {}, opts);
    const auto b = drive(rot, mp, {}, opts);
    for (double t : {1e3, 4e3, 1e4}) {
      const auto bpA = a.B_p_at(t), bpB = b.B_p_at(t);
      const auto ia = tensors::invariants(bpA), ib = tensors::invariants(bpB);
      EXPECT_NEAR(ia.first, ib.first, 1e-10 * ia.first);
      EXPECT_NEAR(ia.second, ib.second, 1e-10 * ia.second);
      EXPECT_NEAR(ia.third, ib.third, 1e-10);
      const auto ta = eigenvalues(evaluate_state(base, mp, t, bpA).T);
      const auto tb = eigenvalues(evaluate_state(rot, mp, t, bpB).T);
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(ta[k], tb[k], 1e-10 * mp.mu_p_bar);
    }
  }
}

TEST(Drive, ShearReportsTracelessConvention) {
  MaterialParams mp{4.79e8, 1.43e9, 3.95e13, std::nullopt};
  const auto traj = drive(
      MotionProtocol::simple_shear([](double t) { return 1e-5 * t; }, [](double) { return 1e-5; }, 0.0, 1e4), mp, {});
  EXPECT_EQ(traj.convention, PressureConvention::Traceless);
  for (const auto& s : traj.samples) EXPECT_NEAR(s.T.trace(), 0.0, 1e-6);
  EXPECT_GT(traj.samples.back().T(0, 1), 0.0);
}

TEST(Drive, DeterminantAbortCarriesPartialTrajectory) {
  DriveOptions opts;
  opts.det_abort = 1e-15;
  opts.rtol = 1e-4;
  opts.atol = 1e-6;
  try {
    drive(MotionProtocol::constant_strain_rate(1e-3, 0.0, 1e4), pmr15(), {}, opts);
    FAIL() << "expected DriveError";
  } catch (const DriveError& e) {
    EXPECT_GE(e.partial().samples.size(), 1u);
  }
}

TEST(Drive, UnimodularProjection) {
  DriveOptions opts;
  opts.project_unimodular = true;
  opts.rtol = 1e-6;
  const auto traj = drive(MotionProtocol::constant_strain_rate(1e-4, 0.0, 1e4), pmr15(), {}, opts);
  EXPECT_LE(traj.max_det_drift(), 1e-14);
}

TEST(Drive, RejectsInvalidInitialState) {
  EvolutionState x0;
  x0.B_p = SymTensor3::diag(2.0, 1.0, 1.0);
  EXPECT_THROW(drive(MotionProtocol::hold(1.0, 0.0, 1.0), pmr15(), x0), ConfigError);
  x0.B_p = SymTensor3::diag(-1.0, -1.0, 1.0);
  EXPECT_THROW(drive(MotionProtocol::hold(1.0, 0.0, 1.0), pmr15(), x0), ConfigError);
  EXPECT_THROW(relax(0.0, pmr15(), 1.0), DomainError);
}

TEST(Drive, RelaxAtUnitStretchIsStressFree) {
  const auto traj = relax(1.0, pmr15(), 1e4);
  for (const auto& s : traj.samples) EXPECT_NEAR(s.T_axial, 0.0, 1e-6);
}
