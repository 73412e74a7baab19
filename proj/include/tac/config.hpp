#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <tac/io.hpp>
#include <tac/presets.hpp>

namespace tac {

struct StudySpec {
  std::string axis;            // one of dt, h, mu, eps
  std::vector<double> levels;  // refinement direction: h increasing, others decreasing

  void validate() const {
    if (axis != "dt" && axis != "h" && axis != "mu" && axis != "eps")
      throw ValidationError("study axis must be one of dt, h, mu, eps (got '" + axis + "')");
    if (levels.size() < 3) throw ValidationError("study needs at least 3 levels");
    for (size_t i = 1; i < levels.size(); ++i) {
      const bool ok = axis == "h" ? levels[i] > levels[i - 1] : levels[i] < levels[i - 1];
      if (!ok)
        throw ValidationError("study levels must be strictly " +
                              std::string(axis == "h" ? "increasing" : "decreasing") +
                              " for axis " + axis);
    }
    if (axis == "h")
      for (double v : levels)
        if (v < 1.0 || v != std::floor(v))
          throw ValidationError("study levels for axis h are subdivision counts (integers >= 1)");
  }
};

// Parsed run description: a preset plus an ordered list of key overrides that
// make_scenario applies on top of it.
struct Config {
  std::string preset = "reference";
  std::filesystem::path out_dir = "out";
  bool emit_vtk = false;
  std::optional<StudySpec> study;
  std::vector<std::pair<std::string, std::string>> entries;
};

namespace detail {

inline const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "run.preset", "run.out", "run.emit_vtk", "run.load_scale",
      "mesh.nx", "mesh.ny", "mesh.file",
      "material.law", "material.power_p", "material.k0", "material.k1",
      "material.lam0", "material.lam1", "material.lam2", "material.theta_eq",
      "material.kappa_pen", "material.lambda_e", "material.mu_e",
      "material.lambda_v", "material.mu_v",
      "solver.eps", "solver.mu", "solver.dt", "solver.t_end", "solver.fp_tol",
      "solver.fp_max_iter", "solver.newton_tol", "solver.newton_max_iter",
      "solver.linear_tol",
      "study.axis", "study.levels",
  };
  return keys;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParseError("key '" + key + "': expected a number, got '" + value + "'");
  }
}

inline int to_int(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParseError("key '" + key + "': expected an integer, got '" + value + "'");
  }
}

inline bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ParseError("key '" + key + "': expected a boolean, got '" + value + "'");
}

inline std::vector<double> to_levels(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss(value);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ParseError("key '" + key + "': empty entry in list");
    out.push_back(to_double(key, item));
  }
  if (out.empty()) throw ParseError("key '" + key + "': empty list");
  return out;
}

// Value shapes are checked as soon as a key arrives so errors carry context.
inline void probe_value(const std::string& key, const std::string& value) {
  static const std::set<std::string> ints = {"mesh.nx", "mesh.ny", "solver.fp_max_iter",
                                             "solver.newton_max_iter"};
  static const std::set<std::string> strings = {"run.preset", "run.out", "mesh.file",
                                                "material.law", "study.axis"};
  if (strings.count(key)) return;
  if (key == "run.emit_vtk") {
    to_bool(key, value);
  } else if (key == "study.levels") {
    to_levels(key, value);
  } else if (ints.count(key)) {
    to_int(key, value);
  } else {
    to_double(key, value);
  }
}

// Routes one validated key to the config; non-run, non-study keys are queued
// for make_scenario.
inline void accept(Config& cfg, const std::string& key, const std::string& value) {
  probe_value(key, value);
  if (key == "run.preset") {
    cfg.preset = value;
  } else if (key == "run.out") {
    cfg.out_dir = value;
  } else if (key == "run.emit_vtk") {
    cfg.emit_vtk = to_bool(key, value);
  } else if (key == "study.axis") {
    if (!cfg.study) cfg.study.emplace();
    cfg.study->axis = value;
  } else if (key == "study.levels") {
    if (!cfg.study) cfg.study.emplace();
    cfg.study->levels = to_levels(key, value);
  } else {
    cfg.entries.emplace_back(key, value);
  }
}

} // namespace detail

// INI-style configuration: [section] headers, key = value lines, comments with
// '#' or ';'. Keys outside the whitelist are rejected with their line number.
inline Config parse_config(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto cut = raw.find_first_of("#;");
    std::string line = detail::trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError("line " + std::to_string(lineno) + ": unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ParseError("line " + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string name = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (name.empty())
      throw ParseError("line " + std::to_string(lineno) + ": empty key");
    if (section.empty())
      throw ParseError("line " + std::to_string(lineno) + ": key '" + name +
                       "' outside any section");
    const std::string key = section + "." + name;
    if (!detail::known_keys().count(key))
      throw ParseError("unknown key '" + key + "' at line " + std::to_string(lineno));
    try {
      detail::accept(cfg, key, value);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

inline Config load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// Command-line override "section.key=value", applied after the file.
inline void apply_override(Config& cfg, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos)
    throw ParseError("override '" + spec + "': expected section.key=value");
  const std::string key = detail::trim(spec.substr(0, eq));
  const std::string value = detail::trim(spec.substr(eq + 1));
  if (!detail::known_keys().count(key))
    throw ParseError("unknown key '" + key + "' in override");
  detail::accept(cfg, key, value);
}

namespace detail {

inline double entry_or(const Config& cfg, const std::string& key, double fallback) {
  double v = fallback;
  for (const auto& [k, val] : cfg.entries)
    if (k == key) v = to_double(key, val);
  return v;
}

inline int entry_or_int(const Config& cfg, const std::string& key, int fallback) {
  int v = fallback;
  for (const auto& [k, val] : cfg.entries)
    if (k == key) v = to_int(key, val);
  return v;
}

} // namespace detail

// The manufactured preset regenerates its sources from the mesh/solver
// numbers in the config; everything that feeds the source derivation is
// resolved here so callers can also reach the exact-field evaluators.
inline ManufacturedCase manufactured_for(const Config& cfg) {
  return manufactured_case(detail::entry_or_int(cfg, "mesh.nx", 16),
                           detail::entry_or_int(cfg, "mesh.ny", 16),
                           detail::entry_or(cfg, "solver.dt", 0.01),
                           detail::entry_or(cfg, "solver.t_end", 0.1),
                           detail::entry_or(cfg, "solver.eps", 0.0),
                           detail::entry_or(cfg, "solver.mu", 1e-2));
}

// Builds the scenario: preset first, then the queued entries in order. The
// manufactured preset regenerates its sources from the final mesh/solver
// numbers, so material keys are rejected there (they would falsify the
// attached sources).
inline Scenario make_scenario(const Config& cfg) {
  Scenario sc;
  std::set<std::string> consumed;
  if (cfg.preset == "manufactured") {
    for (const auto& [key, value] : cfg.entries)
      if (key.rfind("material.", 0) == 0 || key == "mesh.file")
        throw ValidationError("key '" + key + "' is not adjustable for the manufactured preset");
    sc = manufactured_for(cfg).scenario;
    consumed = {"mesh.nx", "mesh.ny", "solver.dt", "solver.t_end", "solver.eps", "solver.mu"};
  } else {
    sc = preset_by_name(cfg.preset);
    const int nx = detail::entry_or_int(cfg, "mesh.nx", 0);
    const int ny = detail::entry_or_int(cfg, "mesh.ny", 0);
    std::string mesh_file;
    for (const auto& [key, value] : cfg.entries)
      if (key == "mesh.file") mesh_file = value;
    if (!mesh_file.empty()) {
      std::ifstream in(mesh_file);
      if (!in) throw IoError("cannot open mesh file " + mesh_file);
      sc.mesh = import_mesh_ascii(in);
    } else if (nx > 0 || ny > 0) {
      if (cfg.preset == "reference")
        sc = reference_preset(nx > 0 ? nx : 32, ny > 0 ? ny : 30);
      else if (cfg.preset == "decoupled")
        sc = decoupled_preset(nx > 0 ? nx : 16, ny > 0 ? ny : 14);
      else
        sc = peel_preset(nx > 0 ? nx : 32, ny > 0 ? ny : 8);
    }
    consumed = {"mesh.nx", "mesh.ny", "mesh.file"};
  }

  std::string law_kind;
  double power_p = 2.0;
  bool law_touched = false;
  double load_scale = 1.0;
  bool load_touched = false;
  // Elasticity tensors are rebuilt from the four moduli if any appears.
  double lambda_e = 2.0, mu_e = 1.0, lambda_v = 0.5, mu_v = 0.25;
  bool tensors_touched = false;

  for (const auto& [key, value] : cfg.entries) {
    if (consumed.count(key)) continue;
    if (key == "run.load_scale") {
      load_scale = detail::to_double(key, value);
      load_touched = true;
    } else if (key == "material.law") {
      law_kind = value;
      law_touched = true;
    } else if (key == "material.power_p") {
      power_p = detail::to_double(key, value);
      law_touched = true;
    } else if (key == "material.k0") {
      sc.mat.k0 = detail::to_double(key, value);
    } else if (key == "material.k1") {
      sc.mat.k1 = detail::to_double(key, value);
    } else if (key == "material.lam0") {
      sc.mat.lam0 = detail::to_double(key, value);
    } else if (key == "material.lam1") {
      sc.mat.lam1 = detail::to_double(key, value);
    } else if (key == "material.lam2") {
      sc.mat.lam2 = detail::to_double(key, value);
    } else if (key == "material.theta_eq") {
      sc.mat.theta_eq = detail::to_double(key, value);
    } else if (key == "material.kappa_pen") {
      sc.mat.kappa_pen = detail::to_double(key, value);
    } else if (key == "material.lambda_e") {
      lambda_e = detail::to_double(key, value);
      tensors_touched = true;
    } else if (key == "material.mu_e") {
      mu_e = detail::to_double(key, value);
      tensors_touched = true;
    } else if (key == "material.lambda_v") {
      lambda_v = detail::to_double(key, value);
      tensors_touched = true;
    } else if (key == "material.mu_v") {
      mu_v = detail::to_double(key, value);
      tensors_touched = true;
    } else if (key == "solver.eps") {
      sc.solver.eps = detail::to_double(key, value);
    } else if (key == "solver.mu") {
      sc.solver.mu = detail::to_double(key, value);
    } else if (key == "solver.dt") {
      sc.solver.dt = detail::to_double(key, value);
    } else if (key == "solver.t_end") {
      sc.solver.t_end = detail::to_double(key, value);
    } else if (key == "solver.fp_tol") {
      sc.solver.fp_tol = detail::to_double(key, value);
    } else if (key == "solver.fp_max_iter") {
      sc.solver.fp_max_iter = detail::to_int(key, value);
    } else if (key == "solver.newton_tol") {
      sc.solver.newton_tol = detail::to_double(key, value);
    } else if (key == "solver.newton_max_iter") {
      sc.solver.newton_max_iter = detail::to_int(key, value);
    } else if (key == "solver.linear_tol") {
      sc.solver.linear_tol = detail::to_double(key, value);
    } else {
      throw ParseError("key '" + key + "' is not applicable here");
    }
  }

  if (law_touched) {
    if (law_kind.empty() || law_kind == "log" || law_kind == "logarithmic")
      sc.mat.thermal_law = ThermalLaw::logarithmic();
    else if (law_kind == "linear")
      sc.mat.thermal_law = ThermalLaw::linear();
    else if (law_kind == "power")
      sc.mat.thermal_law = ThermalLaw::power_law(power_p);
    else
      throw ParseError("material.law must be log, power, or linear (got '" + law_kind + "')");
  }
  if (tensors_touched)
    sc.mat.tensors = ElasticityTensors::isotropic(lambda_e, mu_e, lambda_v, mu_v);

  if (load_touched) {
    const double a = load_scale;
    if (a == 0.0) {
      sc.h = nullptr;
      sc.f = nullptr;
      sc.g = nullptr;
    } else {
      if (sc.h) sc.h = [a, base = sc.h](double x, double y, double t) { return a * base(x, y, t); };
      if (sc.f) sc.f = [a, base = sc.f](double x, double y, double t) { return (a * base(x, y, t)).eval(); };
      if (sc.g) sc.g = [a, base = sc.g](double x, double y, double t) { return (a * base(x, y, t)).eval(); };
    }
  }

  // t_end = 0 asks for the initial state only; the time-march invariants are
  // waived then, everything else still checked.
  if (sc.solver.t_end == 0.0) {
    if (!sc.mesh.marked) throw ValidationError("Scenario: mesh boundary must be marked");
    if (!sc.w0 || !sc.z0 || !sc.u0 || !sc.chi0)
      throw ValidationError("Scenario: initial data missing");
    sc.mat.validate();
    if (!(sc.solver.mu > 0.0)) throw ValidationError("SolverParams: mu must be > 0");
    if (!(sc.solver.eps >= 0.0)) throw ValidationError("SolverParams: eps must be >= 0");
  } else {
    sc.validate();
  }
  if (cfg.study) cfg.study->validate();
  return sc;
}

} // namespace tac
