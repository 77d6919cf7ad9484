#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polyvisc/material.hpp"
#include "polyvisc/uniaxial.hpp"

namespace polyvisc::fitting {

using material::MaterialParams;

struct StrainPoint {
  double t;       ///< s, measured from the start of loading
  double strain;
};

/// One creep test: a constant load followed by recovery at zero load.
struct ExperimentalDataset {
  std::vector<StrainPoint> load;
  std::vector<StrainPoint> unload;
  double stress = 0.0;  ///< Pa
  double temperature_c = 0.0;
  std::string provenance;
  /// Time at which the load is removed. Defaults to the first unload stamp
  /// when not given.
  std::optional<double> unload_start;

  /// Throws ConfigError when phase times are not strictly increasing, the
  /// load phase has fewer than two points, or unload precedes load.
  void validate() const;
  double unload_time() const;
  double end_time() const;
  /// Creep program reproducing this test.
  std::vector<uniaxial::CreepSegment> segments() const;
};

/// Value returned when the simulation fails so the simplex retreats.
inline constexpr double kPenalty = 1e6;

/// Weighted normalized misfit of the load and unload phases:
/// w * ||e_load|| / ||exp_load|| + (1 - w) * ||e_unload|| / ||exp_unload||.
/// Without unload data the weight is forced to 1.
double creep_error(const MaterialParams& mp, const ExperimentalDataset& ds, double w,
                   const uniaxial::CreepOptions& opts = {});

/// Same objective against an already simulated curve.
double creep_error(const uniaxial::CreepCurve& curve, const ExperimentalDataset& ds, double w);

struct SimplexOptions {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double x_tolerance = 1e-8;   ///< relative simplex diameter
  double f_tolerance = 1e-12;  ///< spread of objective values
  std::size_t max_iterations = 2000;
  /// Relative initial edge length (absolute 0.00025 for zero coordinates).
  double initial_step = 0.05;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

SimplexResult nelder_mead(const Objective& f, std::vector<double> x0, const SimplexOptions& opts = {});

struct FitConfig {
  double weight = 0.5;
  MaterialParams initial;
  SimplexOptions simplex;
  /// Additional restarts from the best vertex after convergence.
  int restarts = 2;
  uniaxial::CreepOptions creep;

  void validate() const;
};

struct FitResult {
  MaterialParams params;
  double error = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double weight = 0.5;
};

/// Minimizes creep_error over (log mu_p_bar, log mu_g_bar, log eta).
FitResult fit_dataset(const ExperimentalDataset& ds, const FitConfig& cfg);

/// Evaluates the objective of several datasets concurrently.
std::vector<double> creep_errors(const MaterialParams& mp, const std::vector<ExperimentalDataset>& sets,
                                 double w);

}  // namespace polyvisc::fitting
