#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include <tac/diagnostics.hpp>
#include <tac/stepper.hpp>

namespace tac {

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() +
                          ": " + ec.message());
  }
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  return os;
}

// Per step: solver effort and field ranges. Versioned like the report CSV.
inline constexpr const char* kTrajectoryCsvSchema = "trajectory-v1";
inline constexpr const char* kTrajectoryCsvHeader =
    "step,time,fp_iters,fp_residual,active_set_iters,newton_iters_bulk,"
    "newton_iters_surface,theta_min,theta_max,theta_s_min,theta_s_max,chi_min,chi_max,"
    "u_abs_max,max_penetration";

inline void write_trajectory_row(std::ostream& os, int step, const State& s,
                                 const StepStats& stats, const Mesh& mesh) {
  double pen = 0.0;
  for (int i = 0; i < mesh.n_contact(); ++i) {
    const int v = mesh.contact_nodes[i];
    const Eigen::Vector2d ui(s.u[2 * v], s.u[2 * v + 1]);
    pen = std::max(pen, std::max(0.0, ui.dot(mesh.contact_normals[i])));
  }
  std::ostringstream line;
  line.precision(17);
  line << step << ',' << s.time << ',' << stats.fp_iters << ',' << stats.fp_residual << ','
       << stats.active_set_iters << ',' << stats.newton_iters_bulk << ','
       << stats.newton_iters_surface << ',' << s.theta.minCoeff() << ','
       << s.theta.maxCoeff() << ',' << s.theta_s.minCoeff() << ',' << s.theta_s.maxCoeff()
       << ',' << s.chi.minCoeff() << ',' << s.chi.maxCoeff() << ','
       << s.u.cwiseAbs().maxCoeff() << ',' << pen;
  os << line.str() << '\n';
}

// Legacy ASCII VTK snapshot. Contact-line fields are mapped onto bulk point
// data: zero away from the contact line (mask included so the two are
// distinguishable in a viewer).
inline void write_vtk(const std::filesystem::path& path, const Mesh& mesh, const State& s) {
  std::ofstream os = open_output(path);
  std::ostringstream b;
  b.precision(17);
  const int n = mesh.n_vertices();
  b << "# vtk DataFile Version 3.0\n";
  b << "adhesive contact fields t=" << s.time << "\n";
  b << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  b << "POINTS " << n << " double\n";
  for (int v = 0; v < n; ++v)
    b << mesh.vertices[v].x() << ' ' << mesh.vertices[v].y() << " 0\n";
  b << "CELLS " << mesh.cells.size() << ' ' << 4 * mesh.cells.size() << '\n';
  for (const auto& c : mesh.cells) b << "3 " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  b << "CELL_TYPES " << mesh.cells.size() << '\n';
  for (size_t c = 0; c < mesh.cells.size(); ++c) b << "5\n";

  Eigen::VectorXd theta_s = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd chi = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd mask = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < mesh.n_contact(); ++i) {
    theta_s[mesh.contact_nodes[i]] = s.theta_s[i];
    chi[mesh.contact_nodes[i]] = s.chi[i];
    mask[mesh.contact_nodes[i]] = 1.0;
  }

  b << "POINT_DATA " << n << '\n';
  const auto scalar = [&](const char* name, const Eigen::VectorXd& v) {
    b << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < n; ++i) b << v[i] << '\n';
  };
  scalar("theta", s.theta);
  scalar("w", s.w);
  scalar("theta_s", theta_s);
  scalar("chi", chi);
  scalar("contact_mask", mask);
  b << "VECTORS displacement double\n";
  for (int v = 0; v < n; ++v) b << s.u[2 * v] << ' ' << s.u[2 * v + 1] << " 0\n";

  os << b.str();
  if (!os) throw IoError("failed writing " + path.string());
}

} // namespace tac
