#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "polyvisc/errors.hpp"

namespace polyvisc::ode {

/// dy/dt = f(t, y), written into `dydt`.
using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct OdeProblem {
  Rhs rhs;
  double t0 = 0.0;
  double t1 = 1.0;
  std::vector<double> y0;
  double rtol = 1e-8;
  double atol = 1e-10;
  /// 0 selects the automatic initial step.
  double initial_step = 0.0;
  std::size_t max_steps = 1'000'000;
  /// Called after every accepted step. May modify the state (projection);
  /// return true when it did. May throw to abort the integration.
  std::function<bool(double t, std::span<double> y)> post_step;

  std::size_t dimension() const { return y0.size(); }
};

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

/// Accepted mesh, states and the per-step quartic continuous extension.
class OdeSolution {
 public:
  explicit OdeSolution(std::size_t dim = 0) : dim_(dim) {}

  std::size_t dimension() const { return dim_; }
  const std::vector<double>& times() const { return t_; }
  std::span<const double> state(std::size_t i) const { return {y_.data() + i * dim_, dim_}; }
  std::size_t size() const { return t_.size(); }
  double front_time() const { return t_.front(); }
  double back_time() const { return t_.back(); }
  std::span<const double> back_state() const { return state(size() - 1); }
  const StepStats& stats() const { return stats_; }

  /// Dense output at t in [front_time, back_time]; values outside are clamped.
  std::vector<double> at(double t) const;
  double at(double t, std::size_t component) const;

 private:
  friend class DormandPrince;
  std::size_t locate(double t) const;

  std::size_t dim_;
  std::vector<double> t_;
  std::vector<double> y_;
  // Five coefficient vectors per accepted step.
  std::vector<double> dense_;
  StepStats stats_;
};

/// Integration aborted (step underflow, step cap, or an exception thrown by
/// the right-hand side). Carries the solution up to the last accepted step.
class OdeError : public NumericalError {
 public:
  OdeError(const std::string& what, OdeSolution partial)
      : NumericalError(what), partial_(std::move(partial)) {}
  const OdeSolution& partial() const { return partial_; }
  double last_time() const { return partial_.size() ? partial_.back_time() : 0.0; }

 private:
  OdeSolution partial_;
};

/// Embedded Dormand-Prince 5(4) pair with PI step-size control.
class DormandPrince {
 public:
  static constexpr double kSafety = 0.9;
  static constexpr double kMinFactor = 0.2;
  static constexpr double kMaxFactor = 5.0;
  static constexpr double kBeta = 0.04;
  static constexpr double kAlpha = 0.2 - 0.75 * kBeta;

  OdeSolution integrate(const OdeProblem& problem) const;
};

OdeSolution integrate(const OdeProblem& problem);

}  // namespace polyvisc::ode
