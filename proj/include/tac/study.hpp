#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <tac/config.hpp>
#include <tac/diagnostics.hpp>
#include <tac/io.hpp>

namespace tac {

// ---------------------------------------------------------------------------
// error norms against prescribed fields

// L2 over the bulk with the 3-point edge-midpoint rule (exact for degree 2,
// which covers the square of the P1 interpolation error to leading order).
inline double l2_bulk_scalar_error(const Mesh& mesh, const Eigen::VectorXd& nodal,
                                   const std::function<double(double, double)>& exact) {
  double acc = 0.0;
  for (int c = 0; c < static_cast<int>(mesh.cells.size()); ++c) {
    const auto& t = mesh.cells[c];
    const double area = mesh.cell_area(c);
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      const Eigen::Vector2d mid = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
      const double vh = 0.5 * (nodal[a] + nodal[b]);
      const double d = vh - exact(mid.x(), mid.y());
      acc += area / 3.0 * d * d;
    }
  }
  return std::sqrt(acc);
}

inline double l2_bulk_vector_error(
    const Mesh& mesh, const Eigen::VectorXd& u,
    const std::function<Eigen::Vector2d(double, double)>& exact) {
  double acc = 0.0;
  for (int c = 0; c < static_cast<int>(mesh.cells.size()); ++c) {
    const auto& t = mesh.cells[c];
    const double area = mesh.cell_area(c);
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      const Eigen::Vector2d mid = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
      const Eigen::Vector2d vh(0.5 * (u[2 * a] + u[2 * b]), 0.5 * (u[2 * a + 1] + u[2 * b + 1]));
      acc += area / 3.0 * (vh - exact(mid.x(), mid.y())).squaredNorm();
    }
  }
  return std::sqrt(acc);
}

// L2 over the contact line with 2-point Gauss per edge.
inline double l2_contact_error(const Mesh& mesh, const Eigen::VectorXd& nodal_c,
                               const std::function<double(double, double)>& exact) {
  const double xi = 1.0 / std::sqrt(3.0);
  double acc = 0.0;
  for (const auto& e : mesh.contact_cells) {
    const Eigen::Vector2d pa = mesh.vertices[mesh.contact_nodes[e[0]]];
    const Eigen::Vector2d pb = mesh.vertices[mesh.contact_nodes[e[1]]];
    const double len = (pb - pa).norm();
    for (double s : {0.5 * (1.0 - xi), 0.5 * (1.0 + xi)}) {
      const Eigen::Vector2d p = (1.0 - s) * pa + s * pb;
      const double vh = (1.0 - s) * nodal_c[e[0]] + s * nodal_c[e[1]];
      const double d = vh - exact(p.x(), p.y());
      acc += 0.5 * len * d * d;
    }
  }
  return std::sqrt(acc);
}

// H1-like distance between two states on the same mesh, covering every field.
inline double state_diff_norm(const Stepper& st, const State& a, const State& b) {
  const Eigen::VectorXd dth = a.theta - b.theta;
  const Eigen::VectorXd dts = a.theta_s - b.theta_s;
  const Eigen::VectorXd du = a.u - b.u;
  const Eigen::VectorXd dch = a.chi - b.chi;
  const auto& bf = st.bulk_forms();
  const auto& cf = st.contact_forms();
  double acc = dth.dot(bf.M * dth) + dth.dot(bf.S * dth);
  acc += dts.dot(cf.M * dts) + dts.dot(cf.S * dts);
  acc += du.dot(st.elastic_form_raw() * du);
  acc += dch.dot(cf.M * dch) + dch.dot(cf.S * dch);
  return std::sqrt(std::max(0.0, acc));
}

// Time-integrated variant for whole trajectories (same mesh and step count).
inline double trajectory_diff_norm(const Stepper& st, const std::vector<State>& a,
                                   const std::vector<State>& b, double dt) {
  if (a.size() != b.size())
    throw ValidationError("trajectory_diff_norm: step counts differ");
  double acc = 0.0;
  for (size_t n = 1; n < a.size(); ++n) {
    const double d = state_diff_norm(st, a[n], b[n]);
    acc += dt * d * d;
  }
  return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// single run

struct ScenarioRunResult {
  std::vector<State> states;  // includes the initial state
  std::vector<EnergyReport> reports;
};

// Marches the scenario, streaming trajectory and report CSV rows (and VTK
// snapshots on request) into out_dir. t_end = 0 writes the initial state
// only. Output bytes depend only on the scenario.
inline ScenarioRunResult run_scenario(const Scenario& sc, const std::filesystem::path& out_dir,
                                      bool emit_vtk = false, std::ostream* summary = nullptr) {
  const bool init_only = sc.solver.t_end == 0.0;
  long long n_steps = 0;
  Scenario marched = sc;
  if (init_only) {
    marched.solver.t_end = marched.solver.dt;  // march invariants; no step taken
  } else {
    n_steps = std::llround(sc.solver.t_end / sc.solver.dt);
    if (n_steps < 1 ||
        std::abs(static_cast<double>(n_steps) * sc.solver.dt - sc.solver.t_end) >
            1e-9 * std::max(1.0, sc.solver.t_end))
      throw ValidationError("run_scenario: t_end must be an integer multiple of dt");
  }
  marched.validate();
  Stepper st(marched);

  std::ofstream traj = open_output(out_dir / "trajectory.csv");
  std::ofstream rep = open_output(out_dir / "reports.csv");
  traj << kTrajectoryCsvHeader << '\n';
  rep << kReportCsvHeader << '\n';

  const auto vtk_path = [&](long long k) {
    char name[32];
    std::snprintf(name, sizeof name, "fields_%04lld.vtk", k);
    return out_dir / name;
  };

  ScenarioRunResult res;
  res.states.push_back(st.initial_state());
  res.reports.push_back(make_energy_report(st, res.states.back()));
  write_trajectory_row(traj, 0, res.states.back(), StepStats{}, st.mesh());
  write_report_row(rep, res.reports.back());
  if (emit_vtk) write_vtk(vtk_path(0), st.mesh(), res.states.back());

  for (long long k = 1; k <= n_steps; ++k) {
    State next;
    try {
      next = st.step(res.states.back());
    } catch (const SolverError& e) {
      throw SolverError("step " + std::to_string(k) + ": " + e.what());
    }
    res.reports.push_back(make_energy_report(st, res.states.back(), next));
    res.states.push_back(std::move(next));
    write_trajectory_row(traj, static_cast<int>(k), res.states.back(), st.last_stats(),
                         st.mesh());
    write_report_row(rep, res.reports.back());
    if (emit_vtk) write_vtk(vtk_path(k), st.mesh(), res.states.back());
  }
  traj.flush();
  rep.flush();
  if (!traj || !rep) throw IoError("failed writing run outputs under " + out_dir.string());

  if (summary) {
    double max_res = 0.0, max_pen = 0.0, max_box = 0.0;
    for (const auto& r : res.reports) {
      max_res = std::max(max_res, std::abs(r.lyapunov_residual));
      max_pen = std::max(max_pen, r.max_penetration);
      max_box = std::max(max_box, r.box_violation);
    }
    std::ostringstream line;
    line.precision(17);
    line << "run name=" << sc.name << " nodes=" << st.mesh().n_vertices()
         << " steps=" << n_steps << " lyapunov=" << res.reports.back().lyapunov
         << " max_residual=" << max_res << " max_penetration=" << max_pen
         << " max_box_violation=" << max_box;
    *summary << line.str() << std::endl;
  }
  return res;
}

// ---------------------------------------------------------------------------
// parameter studies

struct StudyLevelResult {
  double value = 0.0;
  int nodes = 0;
  int steps = 0;
  double err_theta = std::numeric_limits<double>::quiet_NaN();
  double err_u = std::numeric_limits<double>::quiet_NaN();
  double err_theta_s = std::numeric_limits<double>::quiet_NaN();
  double err_chi = std::numeric_limits<double>::quiet_NaN();
  double final_lyapunov = std::numeric_limits<double>::quiet_NaN();
  double max_box_violation = std::numeric_limits<double>::quiet_NaN();
  std::string error;  // empty on success
};

struct StudyResult {
  std::string axis;
  std::vector<StudyLevelResult> levels;
  // Consecutive-difference norms: entry i compares level i and i+1. Final
  // states for the dt axis, time-integrated trajectories for mu and eps,
  // unavailable (NaN) for h where meshes differ.
  std::vector<double> diff_norms;
  // Observed orders: from the exact theta errors on the h axis, from the
  // difference norms otherwise.
  std::vector<double> orders;
};

namespace detail {

inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Level config: the study axis pinned to one value. The h axis slaves the
// time step to the square of the mesh ratio so the march error refines with
// the interpolation error.
inline Config config_for_level(const Config& base, const std::string& axis, double value,
                               double nx0) {
  Config cfg = base;
  cfg.study.reset();
  if (axis == "dt") {
    cfg.entries.emplace_back("solver.dt", fmt_g17(value));
  } else if (axis == "mu") {
    cfg.entries.emplace_back("solver.mu", fmt_g17(value));
  } else if (axis == "eps") {
    cfg.entries.emplace_back("solver.eps", fmt_g17(value));
  } else {
    const int nx = static_cast<int>(std::llround(value));
    const double dt0 = entry_or(base, "solver.dt", 0.01);
    const double ratio = nx0 / static_cast<double>(nx);
    cfg.entries.emplace_back("mesh.nx", std::to_string(nx));
    cfg.entries.emplace_back("mesh.ny", std::to_string(nx));
    cfg.entries.emplace_back("solver.dt", fmt_g17(dt0 * ratio * ratio));
  }
  return cfg;
}

inline void write_study_csv(const std::filesystem::path& path, const StudyResult& r) {
  std::ofstream os = open_output(path);
  os << "axis,level,nodes,steps,err_theta,err_u,err_theta_s,err_chi,diff_prev,order_prev,"
        "final_lyapunov,max_box_violation,error\n";
  for (size_t i = 0; i < r.levels.size(); ++i) {
    const auto& L = r.levels[i];
    std::ostringstream line;
    line.precision(17);
    const double diff =
        i > 0 && i - 1 < r.diff_norms.size() ? r.diff_norms[i - 1]
                                             : std::numeric_limits<double>::quiet_NaN();
    const double order = i > 0 && i - 1 < r.orders.size()
                             ? r.orders[i - 1]
                             : std::numeric_limits<double>::quiet_NaN();
    std::string msg = L.error;
    for (auto& ch : msg)
      if (ch == '"' || ch == '\n') ch = '\'';
    line << r.axis << ',' << L.value << ',' << L.nodes << ',' << L.steps << ',' << L.err_theta
         << ',' << L.err_u << ',' << L.err_theta_s << ',' << L.err_chi << ',' << diff << ','
         << order << ',' << L.final_lyapunov << ',' << L.max_box_violation << ",\"" << msg
         << '"';
    os << line.str() << '\n';
  }
  if (!os) throw IoError("failed writing " + path.string());
}

} // namespace detail

// Runs the configured scenario once per study level, writing per-level run
// outputs under <out>/level_<k>/ and a study table at <out>/study.csv. A
// failing level is recorded in the table and does not abort later levels.
inline StudyResult run_study(const Config& cfg, const std::filesystem::path& out_dir,
                             std::ostream* summary = nullptr) {
  if (!cfg.study) throw ValidationError("run_study: config has no [study] section");
  cfg.study->validate();
  const StudySpec& spec = *cfg.study;
  if (spec.axis == "h" && cfg.preset != "manufactured")
    throw ValidationError("study axis h needs the manufactured preset (exact-solution errors)");

  StudyResult result;
  result.axis = spec.axis;
  const double nx0 = spec.levels.front();

  // Kept between levels for the consecutive-difference norms.
  std::vector<State> prev_states;
  std::unique_ptr<Stepper> norm_stepper;  // forms of the first successful level

  for (size_t li = 0; li < spec.levels.size(); ++li) {
    StudyLevelResult lev;
    lev.value = spec.levels[li];
    const Config level_cfg = detail::config_for_level(cfg, spec.axis, spec.levels[li], nx0);
    char dir[32];
    std::snprintf(dir, sizeof dir, "level_%02zu", li);
    try {
      const Scenario sc = make_scenario(level_cfg);
      ScenarioRunResult run = run_scenario(sc, out_dir / dir, cfg.emit_vtk, nullptr);
      lev.nodes = sc.mesh.n_vertices();
      lev.steps = static_cast<int>(run.states.size()) - 1;
      lev.final_lyapunov = run.reports.back().lyapunov;
      lev.max_box_violation = 0.0;
      for (const auto& r : run.reports)
        lev.max_box_violation = std::max(lev.max_box_violation, r.box_violation);

      if (cfg.preset == "manufactured") {
        const ManufacturedCase mc = manufactured_for(level_cfg);
        const double T = run.states.back().time;
        const State& fin = run.states.back();
        lev.err_theta = l2_bulk_scalar_error(
            sc.mesh, fin.theta, [&](double x, double y) { return mc.theta_ex(x, y, T); });
        lev.err_u = l2_bulk_vector_error(sc.mesh, fin.u, [&](double x, double y) {
          return mc.u_ex(x, y, T);
        });
        lev.err_theta_s = l2_contact_error(
            sc.mesh, fin.theta_s, [&](double x, double y) { return mc.theta_s_ex(x, y, T); });
        lev.err_chi = l2_contact_error(
            sc.mesh, fin.chi, [&](double x, double y) { return mc.chi_ex(x, y, T); });
      }

      if (spec.axis != "h") {
        if (!norm_stepper) norm_stepper = std::make_unique<Stepper>(sc);
        if (!prev_states.empty()) {
          double d = std::numeric_limits<double>::quiet_NaN();
          if (spec.axis == "dt")
            d = state_diff_norm(*norm_stepper, prev_states.back(), run.states.back());
          else if (prev_states.size() == run.states.size())
            d = trajectory_diff_norm(*norm_stepper, prev_states, run.states, sc.solver.dt);
          result.diff_norms.push_back(d);
        }
        prev_states = std::move(run.states);
      } else if (li > 0) {
        result.diff_norms.push_back(std::numeric_limits<double>::quiet_NaN());
      }
    } catch (const Error& e) {
      lev.error = e.what();
      prev_states.clear();  // a gap breaks the difference chain
      if (li > 0) result.diff_norms.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    result.levels.push_back(std::move(lev));
    if (summary) {
      std::ostringstream line;
      line.precision(17);
      line << "study axis=" << spec.axis << " level=" << result.levels.back().value;
      if (result.levels.back().error.empty()) {
        line << " nodes=" << result.levels.back().nodes
             << " steps=" << result.levels.back().steps;
        if (cfg.preset == "manufactured")
          line << " err_theta=" << result.levels.back().err_theta;
        if (!result.diff_norms.empty() && li > 0)
          line << " diff_prev=" << result.diff_norms.back();
      } else {
        line << " error=\"" << result.levels.back().error << '"';
      }
      *summary << line.str() << std::endl;
    }
    // Orders from what is available so far.
    result.orders.clear();
    if (spec.axis == "h") {
      for (size_t i = 0; i + 1 < result.levels.size(); ++i) {
        const double e0 = result.levels[i].err_theta, e1 = result.levels[i + 1].err_theta;
        const double r = result.levels[i + 1].value / result.levels[i].value;
        result.orders.push_back(std::log(e0 / e1) / std::log(r));
      }
    } else {
      for (size_t i = 0; i + 1 < result.diff_norms.size(); ++i) {
        const double r = spec.levels[i] / spec.levels[i + 1];
        result.orders.push_back(std::log(result.diff_norms[i] / result.diff_norms[i + 1]) /
                                std::log(r));
      }
    }
    detail::write_study_csv(out_dir / "study.csv", result);
  }
  return result;
}

} // namespace tac
