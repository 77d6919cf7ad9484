#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "polyvisc/evolution.hpp"
#include "polyvisc/fitting.hpp"
#include "polyvisc/material.hpp"
#include "polyvisc/uniaxial.hpp"

namespace polyvisc::dataio {

using fitting::ExperimentalDataset;
using fitting::FitResult;
using material::MaterialParams;

// ------------------------------------------------------------------ presets

/// Fitted parameter set for one material and temperature.
struct Preset {
  std::string name;
  double temperature_c = 0.0;
  std::optional<double> uts_mpa;        ///< ultimate tensile strength
  double mu_p_bar = 0.0;                ///< Pa
  double mu_g_bar = 0.0;                ///< Pa
  double eta = 0.0;                     ///< Pa s
  std::optional<double> load_fraction;  ///< of UTS, used for the fit
  std::optional<double> stress_pa;      ///< load of the fitted creep test
  /// Powers of ten the source tables quote mu_p_bar, mu_g_bar and eta in.
  std::array<int, 3> scale{8, 9, 13};

  MaterialParams params() const;
  /// Stress of the fitted creep test: load_fraction * UTS, or stress_pa.
  double fit_stress() const;
};

/// HFPE-II-52 at 285/300/315/330 C and PMR-15 at 288 C.
const std::vector<Preset>& presets();
/// Throws NotFoundError for unknown names.
const Preset& find_preset(const std::string& name);
/// CSV table of all presets, moduli written as in the source tables
/// (two-decimal mantissa times the quoted power of ten).
std::string format_presets();

// ------------------------------------------------------------ parameters

MaterialParams parse_params_json(const std::string& text);
MaterialParams load_params(const std::filesystem::path& path);
std::string params_to_json(const MaterialParams& mp);

// ---------------------------------------------------------------- datasets

ExperimentalDataset parse_dataset(std::istream& in, const std::string& provenance = {});
ExperimentalDataset load_dataset(const std::filesystem::path& path);
void write_dataset(std::ostream& out, const ExperimentalDataset& ds);
void save_dataset(const std::filesystem::path& path, const ExperimentalDataset& ds);

/// Splits a two-segment load/unload curve into a dataset at its own mesh.
ExperimentalDataset curve_to_dataset(const uniaxial::CreepCurve& curve, double stress);

struct SyntheticSpec {
  double stress = 0.0;       ///< Pa
  double load_time = 0.0;    ///< s
  double unload_time = 0.0;  ///< s, duration of recovery
  std::size_t load_points = 50;
  std::size_t unload_points = 20;
  double noise = 0.0;        ///< relative standard deviation of multiplicative noise
  std::uint64_t seed = 1;
  double temperature_c = 0.0;
};

/// Simulates the creep test and samples it with optional multiplicative
/// Gaussian noise. Load stamps start at t = 0; unload stamps start at the
/// unload time and end at the end of recovery.
ExperimentalDataset synthesize_dataset(const MaterialParams& mp, const SyntheticSpec& spec,
                                       const uniaxial::CreepOptions& opts = {});

// ------------------------------------------------------------------ output

/// Header `t_s,strain`, 1e-9 absolute rounding, one `# segment <k>
/// stress_pa=<v>` comment before each segment.
void write_curve_csv(std::ostream& out, const uniaxial::CreepCurve& curve);
void save_curve_csv(const std::filesystem::path& path, const uniaxial::CreepCurve& curve);

/// Columns t, eps_axial, T11_pa, detBp, xi_m, identity_residual.
void write_trajectory_csv(std::ostream& out, const evolution::Trajectory& traj);
void save_trajectory_csv(const std::filesystem::path& path, const evolution::Trajectory& traj);

std::string fit_result_to_json(const FitResult& fr);
FitResult parse_fit_result_json(const std::string& text);

struct PlotSeries {
  std::string label;
  std::vector<double> t;
  std::vector<double> strain;
  bool markers = false;  ///< experimental overlay: dashed line with point markers
};

PlotSeries to_series(const uniaxial::CreepCurve& curve, std::string label);
PlotSeries to_series(const ExperimentalDataset& ds, std::string label);

/// Standalone 800x600 SVG with one polyline per series and a legend.
std::string render_svg(const std::vector<PlotSeries>& series);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace polyvisc::dataio
