#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "polyvisc/dataio.hpp"
#include "polyvisc/errors.hpp"
#include "polyvisc/evolution.hpp"
#include "polyvisc/fitting.hpp"
#include "polyvisc/uniaxial.hpp"
#include "polyvisc/validation.hpp"

namespace polyvisc::cli {

namespace {

using material::MaterialParams;

/// Bad or conflicting flags detected after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct ParamFlags {
  std::string preset;
  std::string paramsFile;
  std::optional<double> muP, muG, eta;

  void attach(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "Named parameter set (see `presets`)");
    cmd->add_option("--params", paramsFile, "JSON parameter file");
    cmd->add_option("--mu-p", muP, "mu_p_bar in Pa");
    cmd->add_option("--mu-g", muG, "mu_g_bar in Pa");
    cmd->add_option("--eta", eta, "Viscosity eta in Pa s");
  }

  const dataio::Preset* preset_or_null() const {
    return preset.empty() ? nullptr : &dataio::find_preset(preset);
  }

  MaterialParams resolve() const {
    const bool triple = muP || muG || eta;
    const int sources = int(!preset.empty()) + int(!paramsFile.empty()) + int(triple);
    if (sources == 0) throw UsageError("material parameters required: --preset, --params or --mu-p/--mu-g/--eta");
    if (sources > 1) throw UsageError("conflicting parameter sources: give exactly one of --preset, --params, --mu-*");
    if (!preset.empty()) return dataio::find_preset(preset).params();
    if (!paramsFile.empty()) return dataio::load_params(paramsFile);
    if (!(muP && muG && eta)) throw UsageError("--mu-p, --mu-g and --eta must be given together");
    MaterialParams mp;
    mp.mu_p_bar = *muP;
    mp.mu_g_bar = *muG;
    mp.eta = *eta;
    mp.validate();
    return mp;
  }
};

uniaxial::CreepSegment parse_segment(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("--segment expects <stress_pa>:<duration_s>, got '" + text + "'");
  try {
    std::size_t used = 0;
    const std::string s = text.substr(0, colon);
    const std::string d = text.substr(colon + 1);
    const double stress = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    const double duration = std::stod(d, &used);
    if (used != d.size()) throw std::invalid_argument(d);
    return {stress, duration};
  } catch (const std::logic_error&) {
    throw UsageError("--segment expects <stress_pa>:<duration_s>, got '" + text + "'");
  }
}

evolution::Trajectory run_drive(const kinematics::MotionProtocol& protocol, const MaterialParams& mp,
                                const evolution::DriveOptions& opts) {
  evolution::EvolutionState x0;
  x0.B_p = protocol.B(protocol.start());
  return evolution::drive(protocol, mp, x0, opts);
}

void summarize(const evolution::Trajectory& traj, std::ostream& out) {
  const auto& last = traj.samples.back();
  out << "pressure convention: "
      << (traj.convention == evolution::PressureConvention::LateralTractionFree ? "lateral traction free"
                                                                                : "traceless stress")
      << "\n";
  out << "steps: " << traj.stats.accepted << " accepted, " << traj.stats.rejected << " rejected\n";
  out << "final: t = " << num(last.t) << " s, eps_axial = " << num(last.epsilon_axial)
      << ", T11 = " << num(last.T_axial) << " Pa\n";
  out << "max |det B_p - 1| = " << num(traj.max_det_drift()) << ", min xi_m = " << num(traj.min_xi_m())
      << ", max identity residual = " << num(traj.max_identity_residual()) << "\n";
}

kinematics::MotionProtocol load_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open samples '" + path + "'");
  std::vector<double> t, stretch;
  std::string line;
  std::size_t lineNo = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line.rfind("t_s,stretch", 0) != 0) throw ParseError("expected header 't_s,stretch'", lineNo);
      header = true;
      continue;
    }
    std::istringstream row(line);
    double a = 0.0, b = 0.0;
    char comma = 0;
    if (!(row >> a >> comma >> b) || comma != ',') throw ParseError("expected '<t_s>,<stretch>'", lineNo);
    if (!t.empty() && !(a > t.back())) throw ParseError("times must be strictly increasing", lineNo);
    t.push_back(a);
    stretch.push_back(b);
  }
  if (t.size() < 2) throw ParseError("samples file needs at least two rows");
  return kinematics::MotionProtocol::sampled(std::move(t), std::move(stretch));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Creep, relaxation and parameter fitting for a natural-configuration viscoelastic model", "polyvisc"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  // simulate
  ParamFlags simParams;
  std::vector<std::string> segmentsText;
  std::optional<double> loadFraction, tLoad, tUnload;
  std::string simOut, simPlot, datasetOut;
  double simRtol = 1e-8, noise = 0.0;
  std::uint64_t seed = 1;
  std::size_t loadPoints = 50, unloadPoints = 20;
  std::optional<double> temperatureC;
  bool engineering = false;
  auto* simulate = app.add_subcommand("simulate", "Creep/recovery under piecewise-constant axial stress");
  simParams.attach(simulate);
  simulate->add_option("--segment", segmentsText, "<stress_pa>:<duration_s>, repeatable, in order");
  simulate->add_option("--load-fraction", loadFraction, "Load as a fraction of the preset's UTS");
  simulate->add_option("--t-load", tLoad, "Load duration in s (default 5 tau, tau = eta/(2 mu_g_bar))");
  simulate->add_option("--t-unload", tUnload, "Recovery duration in s (default 5 tau)");
  simulate->add_option("--out", simOut, "Curve CSV (t_s,strain)");
  simulate->add_option("--plot", simPlot, "SVG plot of the curve");
  simulate->add_option("--rtol", simRtol, "Relative integration tolerance")->check(CLI::PositiveNumber);
  simulate->add_flag("--engineering", engineering, "Report engineering strain instead of logarithmic");
  simulate->add_option("--dataset-out", datasetOut, "Also write a synthetic load/unload dataset CSV");
  simulate->add_option("--noise", noise, "Relative std. dev. of multiplicative noise for --dataset-out")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--seed", seed, "Noise seed");
  simulate->add_option("--load-points", loadPoints, "Dataset load samples")->check(CLI::Range(2, 1000000));
  simulate->add_option("--unload-points", unloadPoints, "Dataset unload samples");
  simulate->add_option("--temperature-c", temperatureC, "Dataset temperature metadata in C");

  // fit
  std::string dataPath, fitOut, fitInit, fitPlot;
  std::vector<std::string> holdouts;
  double weight = 0.5;
  std::size_t maxIter = 2000;
  auto* fit = app.add_subcommand("fit", "Fit mu_p_bar, mu_g_bar, eta to a creep dataset");
  fit->add_option("--data", dataPath, "Dataset CSV")->required();
  fit->add_option("--weight", weight, "Load-phase weight w in [0, 1]")->check(CLI::Range(0.0, 1.0));
  fit->add_option("--init", fitInit, "Initial guess: preset name or <mu_p_pa>,<mu_g_pa>,<eta_pa_s>");
  fit->add_option("--out", fitOut, "Fit result JSON");
  fit->add_option("--holdout", holdouts, "Dataset CSV to predict with the fitted parameters, repeatable");
  fit->add_option("--max-iter", maxIter, "Simplex iteration cap")->check(CLI::PositiveNumber);
  fit->add_option("--plot", fitPlot, "SVG overlay of data and fitted curve");

  // drive
  ParamFlags driveParams;
  std::string protocolName = "uniaxial", samplesPath, driveOut;
  double rate = 1e-4, duration = 1e4, driveRtol = 1e-8;
  bool projectDet = false;
  auto* driveCmd = app.add_subcommand("drive", "Integrate B_p under a prescribed motion");
  driveParams.attach(driveCmd);
  driveCmd->add_option("--protocol", protocolName, "uniaxial | shear")
      ->check(CLI::IsMember({"uniaxial", "shear"}));
  driveCmd->add_option("--rate", rate, "Log-strain rate (uniaxial) or shear rate in 1/s");
  driveCmd->add_option("--duration", duration, "Duration in s")->check(CLI::PositiveNumber);
  driveCmd->add_option("--samples", samplesPath, "CSV t_s,stretch of a sampled uniaxial stretch history");
  driveCmd->add_option("--rtol", driveRtol, "Relative integration tolerance")->check(CLI::PositiveNumber);
  driveCmd->add_flag("--project-det", projectDet, "Rescale B_p to unit determinant after every step");
  driveCmd->add_option("--out", driveOut, "Trajectory CSV");

  // relax
  ParamFlags relaxParams;
  double stretch = 1.01;
  std::optional<double> hold;
  std::string relaxOut;
  auto* relaxCmd = app.add_subcommand("relax", "Stress relaxation after a sudden axial stretch");
  relaxParams.attach(relaxCmd);
  relaxCmd->add_option("--stretch", stretch, "Held axial stretch")->check(CLI::PositiveNumber);
  relaxCmd->add_option("--hold", hold, "Hold time in s (default 10 eta/(2(mu_p_bar + mu_g_bar)))");
  relaxCmd->add_option("--out", relaxOut, "Trajectory CSV");

  auto* presetsCmd = app.add_subcommand("presets", "Print the built-in parameter table");

  bool quick = false;
  auto* validateCmd = app.add_subcommand("validate", "Run the invariant suite");
  validateCmd->add_flag("--quick", quick, "Sub-second subset");

  std::vector<const char*> argv{"polyvisc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*simulate) {
      const MaterialParams mp = simParams.resolve();
      std::vector<uniaxial::CreepSegment> segments;
      for (const auto& s : segmentsText) segments.push_back(parse_segment(s));
      if (loadFraction) {
        if (!segments.empty()) throw UsageError("--load-fraction conflicts with --segment");
        const auto* preset = simParams.preset_or_null();
        if (!preset || !preset->uts_mpa) throw UsageError("--load-fraction needs a --preset with a UTS");
        const bool needTau = !tLoad || !tUnload;
        if (needTau && !(mp.mu_g_bar > 0.0))
          throw UsageError("default durations need mu_g_bar > 0; give --t-load and --t-unload");
        const double tau = needTau ? mp.creep_time_constant() : 0.0;
        segments.push_back({*loadFraction * *preset->uts_mpa * 1e6, tLoad.value_or(5.0 * tau)});
        const double unloadTime = tUnload.value_or(5.0 * tau);
        if (unloadTime > 0.0) segments.push_back({0.0, unloadTime});
      } else if (tLoad || tUnload) {
        throw UsageError("--t-load/--t-unload apply only with --load-fraction");
      }
      if (segments.empty()) throw UsageError("give --segment <stress_pa>:<duration_s> or --load-fraction");

      uniaxial::CreepOptions copts;
      copts.rtol = simRtol;
      copts.engineering_strain = engineering;
      const auto curve = uniaxial::simulate_creep(segments, mp, copts);

      out << "eps(0+) = " << num(curve.samples().front().strain) << "\n";
      out << "eps_end = " << num(curve.samples().back().strain) << "\n";
      for (const auto& m : curve.segments())
        out << "segment " << m.index << ": start " << num(m.start) << " s, stress " << num(m.stress)
            << " Pa, B = " << num(m.B) << "\n";
      if (!simOut.empty()) dataio::save_curve_csv(simOut, curve);
      if (!simPlot.empty()) dataio::write_text(simPlot, dataio::render_svg({dataio::to_series(curve, "model")}));

      if (!datasetOut.empty()) {
        if (segments.size() > 2 || (segments.size() == 2 && segments[1].stress != 0.0))
          throw UsageError("--dataset-out needs one load segment optionally followed by a zero-stress segment");
        dataio::SyntheticSpec spec;
        spec.stress = segments[0].stress;
        spec.load_time = segments[0].duration;
        spec.unload_time = segments.size() == 2 ? segments[1].duration : 0.0;
        spec.load_points = loadPoints;
        spec.unload_points = segments.size() == 2 ? unloadPoints : 0;
        spec.noise = noise;
        spec.seed = seed;
        const auto* preset = simParams.preset_or_null();
        spec.temperature_c = temperatureC.value_or(preset ? preset->temperature_c : 0.0);
        dataio::save_dataset(datasetOut, dataio::synthesize_dataset(mp, spec, copts));
      }
      return kOk;
    }

    if (*fit) {
      const auto ds = dataio::load_dataset(dataPath);
      fitting::FitConfig cfg;
      cfg.weight = weight;
      cfg.simplex.max_iterations = maxIter;
      if (fitInit.empty()) {
        cfg.initial = dataio::find_preset("hfpe285").params();
      } else if (fitInit.find(',') != std::string::npos) {
        std::vector<double> v;
        std::istringstream ss(fitInit);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
          try {
            v.push_back(std::stod(cell));
          } catch (const std::logic_error&) {
            throw UsageError("--init expects a preset or <mu_p_pa>,<mu_g_pa>,<eta_pa_s>");
          }
        }
        if (v.size() != 3) throw UsageError("--init expects a preset or <mu_p_pa>,<mu_g_pa>,<eta_pa_s>");
        cfg.initial.mu_p_bar = v[0];
        cfg.initial.mu_g_bar = v[1];
        cfg.initial.eta = v[2];
      } else {
        cfg.initial = dataio::find_preset(fitInit).params();
      }

      const auto result = fitting::fit_dataset(ds, cfg);
      out << "error = " << num(result.error) << " (w = " << num(result.weight) << ")\n";
      out << "mu_p_bar = " << num(result.params.mu_p_bar) << " Pa\n";
      out << "mu_g_bar = " << num(result.params.mu_g_bar) << " Pa\n";
      out << "eta = " << num(result.params.eta) << " Pa s\n";
      out << "iterations = " << result.iterations << (result.converged ? ", converged" : ", NOT converged") << "\n";
      if (!result.converged) err << "warning: simplex stopped at the iteration cap\n";
      if (!fitOut.empty()) dataio::write_text(fitOut, dataio::fit_result_to_json(result));

      if (!holdouts.empty()) {
        std::vector<fitting::ExperimentalDataset> sets;
        for (const auto& h : holdouts) sets.push_back(dataio::load_dataset(h));
        const auto errors = fitting::creep_errors(result.params, sets, weight);
        for (std::size_t i = 0; i < sets.size(); ++i)
          out << "holdout " << holdouts[i] << " (stress " << num(sets[i].stress) << " Pa): error = " << num(errors[i])
              << "\n";
      }
      if (!fitPlot.empty()) {
        const auto curve = uniaxial::simulate_creep(ds.segments(), result.params, cfg.creep);
        dataio::write_text(fitPlot, dataio::render_svg({dataio::to_series(ds, "data"),
                                                        dataio::to_series(curve, "fit")}));
      }
      return kOk;
    }

    if (*driveCmd) {
      const MaterialParams mp = driveParams.resolve();
      evolution::DriveOptions opts;
      opts.rtol = driveRtol;
      opts.project_unimodular = projectDet;
      std::optional<kinematics::MotionProtocol> protocol;
      if (!samplesPath.empty()) {
        if (protocolName != "uniaxial") throw UsageError("--samples prescribes a uniaxial stretch history");
        protocol = load_samples(samplesPath);
      } else if (protocolName == "uniaxial") {
        protocol = kinematics::MotionProtocol::constant_strain_rate(rate, 0.0, duration);
      } else {
        protocol = kinematics::MotionProtocol::simple_shear([rate](double t) { return rate * t; },
                                                            [rate](double) { return rate; }, 0.0, duration);
      }
      const auto traj = run_drive(*protocol, mp, opts);
      summarize(traj, out);
      if (!driveOut.empty()) dataio::save_trajectory_csv(driveOut, traj);
      return kOk;
    }

    if (*relaxCmd) {
      const MaterialParams mp = relaxParams.resolve();
      const double holdTime = hold.value_or(10.0 * mp.eta / (2.0 * (mp.mu_p_bar + mp.mu_g_bar)));
      const auto traj = evolution::relax(stretch, mp, holdTime);
      out << "T11(0) = " << num(traj.samples.front().T_axial) << " Pa\n";
      summarize(traj, out);
      if (!relaxOut.empty()) dataio::save_trajectory_csv(relaxOut, traj);
      return kOk;
    }

    if (*presetsCmd) {
      out << dataio::format_presets();
      return kOk;
    }

    if (*validateCmd) {
      validation::SuiteOptions opts;
      opts.quick = quick;
      const auto results = validation::run_suite(opts);
      for (const auto& r : results) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s %-22s value=%-11.4g tol=%-9.3g %7.3f s  ", r.passed ? "PASS" : "FAIL",
                      r.name.c_str(), r.value, r.tolerance, r.seconds);
        out << buf << r.detail << "\n";
      }
      if (!validation::all_passed(results)) {
        for (const auto& r : results)
          if (!r.passed) err << "validation failed: " << r.name << "\n";
        return kValidationFailure;
      }
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const NotFoundError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const ConfigError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const DomainError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kUsage;
}

}  // namespace polyvisc::cli
