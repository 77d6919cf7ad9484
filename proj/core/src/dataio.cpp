#include "polyvisc/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "polyvisc/errors.hpp"

namespace polyvisc::dataio {

namespace {

using nlohmann::json;

std::string shortest(double v) {
  char buf[64];
  const bool plain = v == 0.0 || (std::abs(v) >= 1e-3 && std::abs(v) < 1e6);
  const auto res = plain ? std::to_chars(buf, buf + sizeof buf, v)
                         : std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific);
  return std::string(buf, res.ptr);
}

std::string fixed9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  // Avoid "-0.000000000".
  if (std::string_view(buf) == "-0.000000000") return "0.000000000";
  return buf;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& text, std::size_t line, const std::string& what) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw ParseError("invalid " + what + " '" + s + "'", line);
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path.string() + "' for writing");
  return out;
}

double get_number(const json& obj, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ParseError(std::string("parameter '") + key + "' must be a number");
  return v.get<double>();
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw ParseError("unknown key '" + key + "' in " + where);
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

// ------------------------------------------------------------------ presets

MaterialParams Preset::params() const {
  MaterialParams mp;
  mp.mu_p_bar = mu_p_bar;
  mp.mu_g_bar = mu_g_bar;
  mp.eta = eta;
  return mp;
}

double Preset::fit_stress() const {
  if (stress_pa) return *stress_pa;
  return *load_fraction * *uts_mpa * 1e6;
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table{
      {"hfpe285", 285.0, 43.0, 4.79e8, 1.43e9, 3.95e13, 0.45, std::nullopt},
      {"hfpe300", 300.0, 40.2, 4.12e8, 0.51e9, 2.23e13, 0.45, std::nullopt},
      {"hfpe315", 315.0, 36.3, 4.19e8, 0.79e9, 4.04e13, 0.30, std::nullopt},
      {"hfpe330", 330.0, 23.8, 5.07e8, 0.79e9, 3.19e13, 0.20, std::nullopt},
      {"pmr15_288", 288.0, std::nullopt, 3.76e8, 4.42e8, 6.22e12, std::nullopt, 1.0e7, {8, 8, 12}},
  };
  return table;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  throw NotFoundError("unknown preset '" + name + "'");
}

std::string format_presets() {
  const auto fmt = [](const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return std::string(buf);
  };
  const auto scaled = [&fmt](double v, int exponent) {
    return fmt("%.2f", v / std::pow(10.0, exponent)) + "e" + std::to_string(exponent);
  };
  std::ostringstream out;
  out << "name,temperature_c,uts_mpa,mu_p_bar_pa,mu_g_bar_pa,eta_pa_s,load_fraction,stress_mpa\n";
  for (const auto& p : presets()) {
    out << p.name << ',' << fmt("%.0f", p.temperature_c) << ',' << (p.uts_mpa ? fmt("%.1f", *p.uts_mpa) : "")
        << ',' << scaled(p.mu_p_bar, p.scale[0]) << ',' << scaled(p.mu_g_bar, p.scale[1]) << ','
        << scaled(p.eta, p.scale[2]) << ',' << (p.load_fraction ? fmt("%.2f", *p.load_fraction) : "") << ','
        << (p.stress_pa ? fmt("%g", *p.stress_pa / 1e6) : "") << '\n';
  }
  return out.str();
}

// ------------------------------------------------------------ parameters

MaterialParams parse_params_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("parameter file: ") + e.what());
  }
  reject_unknown(doc, {"mu_p_bar", "mu_g_bar", "eta", "thermal"}, "parameter file");
  MaterialParams mp;
  try {
    mp.mu_p_bar = get_number(doc, "mu_p_bar");
    mp.mu_g_bar = get_number(doc, "mu_g_bar");
    mp.eta = get_number(doc, "eta");
    if (doc.contains("thermal")) {
      const auto& th = doc["thermal"];
      reject_unknown(th, {"theta_s", "c1", "c2", "A_s", "B_s", "conductivity", "density", "moduli"},
                     "thermal block");
      material::ThermalParams tp;
      const auto opt = [&th](const char* key, double& dst) {
        if (th.contains(key)) dst = get_number(th, key);
      };
      opt("theta_s", tp.theta_s);
      opt("c1", tp.c1);
      opt("c2", tp.c2);
      opt("A_s", tp.A_s);
      opt("B_s", tp.B_s);
      opt("conductivity", tp.conductivity);
      opt("density", tp.density);
      if (th.contains("moduli")) {
        const auto& m = th["moduli"];
        reject_unknown(m, {"mu_p0", "mu_p1", "mu_g0", "mu_g1"}, "moduli block");
        material::AffineModuli am;
        am.mu_p0 = get_number(m, "mu_p0");
        am.mu_p1 = get_number(m, "mu_p1");
        am.mu_g0 = get_number(m, "mu_g0");
        am.mu_g1 = get_number(m, "mu_g1");
        tp.moduli = am;
      }
      mp.thermal = tp;
    }
  } catch (const json::out_of_range& e) {
    throw ParseError(std::string("parameter file: missing key: ") + e.what());
  }
  try {
    mp.validate();
  } catch (const ConfigError& e) {
    throw ParseError(std::string("parameter file: ") + e.what());
  }
  return mp;
}

MaterialParams load_params(const std::filesystem::path& path) { return parse_params_json(read_text(path)); }

std::string params_to_json(const MaterialParams& mp) {
  json doc = {{"mu_p_bar", mp.mu_p_bar}, {"mu_g_bar", mp.mu_g_bar}, {"eta", mp.eta}};
  if (mp.thermal) {
    const auto& tp = *mp.thermal;
    json th = {{"theta_s", tp.theta_s}, {"c1", tp.c1}, {"c2", tp.c2},          {"A_s", tp.A_s},
               {"B_s", tp.B_s},         {"conductivity", tp.conductivity}, {"density", tp.density}};
    if (tp.moduli)
      th["moduli"] = {{"mu_p0", tp.moduli->mu_p0},
                      {"mu_p1", tp.moduli->mu_p1},
                      {"mu_g0", tp.moduli->mu_g0},
                      {"mu_g1", tp.moduli->mu_g1}};
    doc["thermal"] = th;
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------- datasets

ExperimentalDataset parse_dataset(std::istream& in, const std::string& provenance) {
  ExperimentalDataset ds;
  ds.provenance = provenance;
  bool haveStress = false;
  bool haveHeader = false;
  std::string raw;
  std::size_t lineNo = 0;
  std::size_t firstUnloadLine = 0;

  while (std::getline(in, raw)) {
    ++lineNo;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string body = trim(std::string_view(line).substr(1));
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = trim(std::string_view(body).substr(0, eq));
      const std::string value = trim(std::string_view(body).substr(eq + 1));
      if (key == "stress_pa") {
        ds.stress = parse_number(value, lineNo, "stress_pa");
        haveStress = true;
      } else if (key == "temperature_c") {
        ds.temperature_c = parse_number(value, lineNo, "temperature_c");
      } else if (key == "unload_start_s") {
        ds.unload_start = parse_number(value, lineNo, "unload_start_s");
      } else if (key == "provenance") {
        ds.provenance = value;
      }
      continue;
    }
    const auto cells = split(line, ',');
    if (!haveHeader) {
      if (cells != std::vector<std::string>{"segment", "t_s", "strain"})
        throw ParseError("expected header 'segment,t_s,strain'", lineNo);
      haveHeader = true;
      continue;
    }
    if (cells.size() != 3) throw ParseError("expected 3 columns", lineNo);
    const fitting::StrainPoint pt{parse_number(cells[1], lineNo, "time"),
                                  parse_number(cells[2], lineNo, "strain")};
    std::vector<fitting::StrainPoint>* phase = nullptr;
    if (cells[0] == "load") {
      if (!ds.unload.empty()) throw ParseError("load sample after unload samples", lineNo);
      phase = &ds.load;
    } else if (cells[0] == "unload") {
      if (ds.unload.empty()) firstUnloadLine = lineNo;
      phase = &ds.unload;
    } else {
      throw ParseError("unknown segment label '" + cells[0] + "'", lineNo);
    }
    if (!phase->empty() && !(pt.t > phase->back().t))
      throw ParseError("times must be strictly increasing within a segment", lineNo);
    if (phase == &ds.unload && ds.unload.empty() && !ds.load.empty() && !(pt.t > ds.load.back().t))
      throw ParseError("unload times must follow load times", lineNo);
    phase->push_back(pt);
  }

  if (!haveStress) throw ParseError("missing '# stress_pa=<value>' metadata");
  if (!haveHeader) throw ParseError("missing header 'segment,t_s,strain'");
  try {
    ds.validate();
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), firstUnloadLine);
  }
  return ds;
}

ExperimentalDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset '" + path.string() + "'");
  return parse_dataset(in, path.filename().string());
}

void write_dataset(std::ostream& out, const ExperimentalDataset& ds) {
  out << "# stress_pa=" << shortest(ds.stress) << '\n';
  out << "# temperature_c=" << shortest(ds.temperature_c) << '\n';
  if (ds.unload_start) out << "# unload_start_s=" << shortest(*ds.unload_start) << '\n';
  if (!ds.provenance.empty()) out << "# provenance=" << ds.provenance << '\n';
  out << "segment,t_s,strain\n";
  // Shortest round-trip text: datasets feed fits, so no rounding floor.
  for (const auto& p : ds.load) out << "load," << shortest(p.t) << ',' << shortest(p.strain) << '\n';
  for (const auto& p : ds.unload) out << "unload," << shortest(p.t) << ',' << shortest(p.strain) << '\n';
}

void save_dataset(const std::filesystem::path& path, const ExperimentalDataset& ds) {
  auto out = open_out(path);
  write_dataset(out, ds);
}

ExperimentalDataset curve_to_dataset(const uniaxial::CreepCurve& curve, double stress) {
  if (curve.segments().size() != 2)
    throw ConfigError("curve_to_dataset: expected a load segment followed by an unload segment");
  ExperimentalDataset ds;
  ds.stress = stress;
  ds.unload_start = curve.segments()[1].start;
  for (const auto& s : curve.samples())
    (s.t < *ds.unload_start ? ds.load : ds.unload).push_back({s.t, s.strain});
  ds.provenance = "simulated";
  return ds;
}

ExperimentalDataset synthesize_dataset(const MaterialParams& mp, const SyntheticSpec& spec,
                                       const uniaxial::CreepOptions& opts) {
  if (spec.load_points < 2) throw ConfigError("synthetic dataset: need at least two load points");
  if (!(spec.load_time > 0.0)) throw ConfigError("synthetic dataset: load time must be positive");
  std::vector<uniaxial::CreepSegment> segs{{spec.stress, spec.load_time}};
  const bool recovery = spec.unload_points > 0 && spec.unload_time > 0.0;
  if (recovery) segs.push_back({0.0, spec.unload_time});
  const auto curve = uniaxial::simulate_creep(segs, mp, opts);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto noisy = [&](double v) { return spec.noise > 0.0 ? v * (1.0 + spec.noise * gauss(rng)) : v; };

  ExperimentalDataset ds;
  ds.stress = spec.stress;
  ds.temperature_c = spec.temperature_c;
  ds.provenance = "synthetic";
  for (std::size_t i = 0; i < spec.load_points; ++i) {
    const double t = spec.load_time * static_cast<double>(i) / static_cast<double>(spec.load_points);
    ds.load.push_back({t, noisy(curve.strain_at(t))});
  }
  if (recovery) {
    ds.unload_start = spec.load_time;
    for (std::size_t j = 0; j < spec.unload_points; ++j) {
      const double frac = spec.unload_points == 1
                              ? 0.0
                              : static_cast<double>(j) / static_cast<double>(spec.unload_points - 1);
      const double t = spec.load_time + spec.unload_time * frac;
      ds.unload.push_back({t, noisy(curve.strain_at(t))});
    }
  }
  ds.validate();
  return ds;
}

// ------------------------------------------------------------------ output

void write_curve_csv(std::ostream& out, const uniaxial::CreepCurve& curve) {
  out << "t_s,strain\n";
  const auto& marks = curve.segments();
  std::size_t next = 0;
  for (const auto& s : curve.samples()) {
    while (next < marks.size() && marks[next].start <= s.t) {
      out << "# segment " << marks[next].index << " stress_pa=" << shortest(marks[next].stress) << '\n';
      ++next;
    }
    out << fixed9(s.t) << ',' << fixed9(s.strain) << '\n';
  }
}

void save_curve_csv(const std::filesystem::path& path, const uniaxial::CreepCurve& curve) {
  auto out = open_out(path);
  write_curve_csv(out, curve);
}

void write_trajectory_csv(std::ostream& out, const evolution::Trajectory& traj) {
  out << "t,eps_axial,T11_pa,detBp,xi_m,identity_residual\n";
  char buf[256];
  for (const auto& s : traj.samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.epsilon_axial, s.T_axial,
                  s.det_Bp, s.xi_m, s.identity_residual);
    out << buf;
  }
}

void save_trajectory_csv(const std::filesystem::path& path, const evolution::Trajectory& traj) {
  auto out = open_out(path);
  write_trajectory_csv(out, traj);
}

std::string fit_result_to_json(const FitResult& fr) {
  const json doc = {{"mu_p_bar", fr.params.mu_p_bar}, {"mu_g_bar", fr.params.mu_g_bar},
                    {"eta", fr.params.eta},           {"error", fr.error},
                    {"iterations", fr.iterations},    {"converged", fr.converged},
                    {"w", fr.weight}};
  return doc.dump(2) + "\n";
}

FitResult parse_fit_result_json(const std::string& text) {
  FitResult fr;
  try {
    const json doc = json::parse(text);
    reject_unknown(doc, {"mu_p_bar", "mu_g_bar", "eta", "error", "iterations", "converged", "w"},
                   "fit result");
    fr.params.mu_p_bar = get_number(doc, "mu_p_bar");
    fr.params.mu_g_bar = get_number(doc, "mu_g_bar");
    fr.params.eta = get_number(doc, "eta");
    fr.error = get_number(doc, "error");
    fr.iterations = doc.at("iterations").get<std::size_t>();
    fr.converged = doc.at("converged").get<bool>();
    fr.weight = get_number(doc, "w");
  } catch (const json::exception& e) {
    throw ParseError(std::string("fit result: ") + e.what());
  }
  return fr;
}

PlotSeries to_series(const uniaxial::CreepCurve& curve, std::string label) {
  PlotSeries s;
  s.label = std::move(label);
  for (const auto& p : curve.samples()) {
    s.t.push_back(p.t);
    s.strain.push_back(p.strain);
  }
  return s;
}

PlotSeries to_series(const ExperimentalDataset& ds, std::string label) {
  PlotSeries s;
  s.label = std::move(label);
  s.markers = true;
  for (const auto* phase : {&ds.load, &ds.unload})
    for (const auto& p : *phase) {
      s.t.push_back(p.t);
      s.strain.push_back(p.strain);
    }
  return s;
}

std::string render_svg(const std::vector<PlotSeries>& series) {
  if (series.empty()) throw ConfigError("render_svg: no curves to plot");
  constexpr double width = 800, height = 600;
  constexpr double left = 90, right = 30, top = 30, bottom = 70;
  constexpr double plotW = width - left - right, plotH = height - top - bottom;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  double tmin = INFINITY, tmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series) {
    if (s.t.size() != s.strain.size()) throw ConfigError("render_svg: mismatched series lengths");
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      tmin = std::min(tmin, s.t[i]);
      tmax = std::max(tmax, s.t[i]);
      ymin = std::min(ymin, s.strain[i]);
      ymax = std::max(ymax, s.strain[i]);
    }
  }
  if (!std::isfinite(tmin)) throw ConfigError("render_svg: curves contain no points");
  const auto axis_range = [](double lo, double hi) {
    if (hi - lo <= 0.0) return std::pair{lo, lo + (lo == 0.0 ? 1.0 : std::abs(lo))};
    const double pad = 0.05 * (hi - lo);
    return std::pair{lo - pad, hi + pad};
  };
  const auto [x0, x1] = axis_range(tmin, tmax);
  const auto [y0, y1] = axis_range(ymin, ymax);
  const auto px = [&, x0 = x0, x1 = x1](double t) { return left + (t - x0) / (x1 - x0) * plotW; };
  const auto py = [&, y0 = y0, y1 = y1](double y) { return top + plotH - (y - y0) / (y1 - y0) * plotH; };

  std::ostringstream svg;
  char buf[160];
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"none\" stroke=\"black\"/>\n",
                left, top, plotW, plotH);
  svg << buf;

  for (int k = 0; k <= 4; ++k) {
    const double t = x0 + (x1 - x0) * k / 4.0;
    const double y = y0 + (y1 - y0) * k / 4.0;
    std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" text-anchor=\"middle\">%.4g</text>\n",
                  px(t), top + plotH + 18, t);
    svg << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" text-anchor=\"end\">%.4g</text>\n",
                  left - 6, py(y) + 4, y);
    svg << buf;
  }
  svg << "<text x=\"" << left + plotW / 2 << "\" y=\"" << height - 20
      << "\" font-size=\"14\" text-anchor=\"middle\">time (s)</text>\n";
  svg << "<text x=\"20\" y=\"" << top + plotH / 2 << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << top + plotH / 2 << ")\">strain</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* colour = palette[k % std::size(palette)];
    svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\""
        << (s.markers ? " stroke-dasharray=\"4 3\"" : "") << " points=\"";
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i ? " " : "", px(s.t[i]), py(s.strain[i]));
      svg << buf;
    }
    svg << "\"/>\n";
    if (s.markers)
      for (std::size_t i = 0; i < s.t.size(); ++i) {
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2.5\" fill=\"%s\"/>\n", px(s.t[i]),
                      py(s.strain[i]), colour);
        svg << buf;
      }
    const double ly = top + 18 + 18.0 * static_cast<double>(k);
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\" stroke-width=\"2\"/>\n",
                  left + plotW - 170, ly - 4, left + plotW - 145, ly - 4, colour);
    svg << buf << "<text x=\"" << left + plotW - 140 << "\" y=\"" << ly << "\" font-size=\"12\">"
        << xml_escape(s.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

}  // namespace polyvisc::dataio
