#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tac/assembly.hpp"
#include "tac/constitutive.hpp"
#include "tac/errors.hpp"
#include "tac/mesh.hpp"
#include "tac/monotone.hpp"

namespace tac {

using ScalarField = std::function<double(double, double, double)>; // (x, y, t)
using VectorField = std::function<Eigen::Vector2d(double, double, double)>;
using ScalarInit = std::function<double(double, double)>;
using VectorInit = std::function<Eigen::Vector2d(double, double)>;

struct SolverParams {
  double eps = 1e-3;  // parabolic regularization of the temperature equations
  double mu = 1e-2;   // Yosida parameter of the entropy nonlinearity
  double dt = 5e-3;
  double t_end = 0.5;
  double fp_tol = 1e-10; // relative increment tolerance of the outer loop
  int fp_max_iter = 200;
  double newton_tol = 1e-12;
  int newton_max_iter = 100;
  double linear_tol = 1e-9; // accepted relative residual of direct solves

  void validate() const {
    if (!(mu > 0.0)) throw ValidationError("SolverParams: mu must be > 0");
    if (!(eps >= 0.0)) throw ValidationError("SolverParams: eps must be >= 0");
    if (!(dt > 0.0)) throw ValidationError("SolverParams: dt must be > 0");
    if (!(t_end >= dt)) throw ValidationError("SolverParams: t_end must be >= dt");
    if (!(fp_tol > 0.0)) throw ValidationError("SolverParams: fp_tol must be > 0");
    if (fp_max_iter < 1) throw ValidationError("SolverParams: fp_max_iter must be >= 1");
    if (!(linear_tol > 0.0)) throw ValidationError("SolverParams: linear_tol must be > 0");
    RegParams{mu, newton_tol, newton_max_iter}.validate();
  }
  RegParams reg() const { return RegParams{mu, newton_tol, newton_max_iter}; }
};

struct State {
  Eigen::VectorXd theta, w;       // bulk nodal scalars, w = L_mu(theta) nodally
  Eigen::VectorXd theta_s, z;     // contact nodal scalars, z = L_mu(theta_s)
  Eigen::VectorXd u;              // interleaved displacement, zero on the clamped boundary
  Eigen::VectorXd chi, xi, eta_n; // contact nodal: damage in [0,1], its multiplier, penalty force
  double time = 0.0;
};

struct Scenario {
  std::string name = "scenario";
  Mesh mesh;
  MaterialParams mat;
  SolverParams solver;
  ScalarField h; // bulk heat source
  VectorField f; // body force
  VectorField g; // traction on the free boundary
  ScalarInit w0, z0, chi0;
  VectorInit u0;
  // Extra surface sources, null when absent; used by manufactured runs.
  ScalarField h_s;   // heat source on the contact line
  ScalarField g_chi; // source in the damage equation
  VectorField g_c;   // traction on the contact line
  ScalarField b_c;   // heat flux correction on the contact line

  void validate() const {
    if (!mesh.marked) throw ValidationError("Scenario: mesh boundary must be marked");
    if (!w0 || !z0 || !u0 || !chi0) throw ValidationError("Scenario: initial data missing");
    mat.validate();
    solver.validate();
  }
};

namespace detail {

inline Eigen::VectorXd nodal_scalar(const Mesh& mesh, const ScalarInit& f) {
  Eigen::VectorXd out(mesh.n_vertices());
  for (int v = 0; v < mesh.n_vertices(); ++v)
    out[v] = f(mesh.vertices[v].x(), mesh.vertices[v].y());
  return out;
}

inline Eigen::VectorXd nodal_scalar_t(const Mesh& mesh, const ScalarField& f, double t) {
  Eigen::VectorXd out(mesh.n_vertices());
  for (int v = 0; v < mesh.n_vertices(); ++v)
    out[v] = f(mesh.vertices[v].x(), mesh.vertices[v].y(), t);
  return out;
}

inline Eigen::VectorXd contact_scalar(const Mesh& mesh, const ScalarInit& f) {
  Eigen::VectorXd out(mesh.n_contact());
  for (int i = 0; i < mesh.n_contact(); ++i) {
    const auto& p = mesh.vertices[mesh.contact_nodes[i]];
    out[i] = f(p.x(), p.y());
  }
  return out;
}

inline Eigen::VectorXd contact_scalar_t(const Mesh& mesh, const ScalarField& f, double t) {
  Eigen::VectorXd out(mesh.n_contact());
  for (int i = 0; i < mesh.n_contact(); ++i) {
    const auto& p = mesh.vertices[mesh.contact_nodes[i]];
    out[i] = f(p.x(), p.y(), t);
  }
  return out;
}

inline Eigen::VectorXd nodal_vector(const Mesh& mesh, const VectorInit& f) {
  Eigen::VectorXd out(2 * mesh.n_vertices());
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const Eigen::Vector2d val = f(mesh.vertices[v].x(), mesh.vertices[v].y());
    out[2 * v] = val.x();
    out[2 * v + 1] = val.y();
  }
  return out;
}

// Consistent P1 line load on the contact cells, interleaved bulk indexing.
inline Eigen::VectorXd contact_vector_load(const Mesh& mesh, const VectorField& gc, double t) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * mesh.n_vertices());
  if (!gc) return out;
  for (const auto& e : mesh.contact_cells) {
    const int va = mesh.contact_nodes[e[0]], vb = mesh.contact_nodes[e[1]];
    const double len = (mesh.vertices[vb] - mesh.vertices[va]).norm();
    const Eigen::Vector2d ga = gc(mesh.vertices[va].x(), mesh.vertices[va].y(), t);
    const Eigen::Vector2d gb = gc(mesh.vertices[vb].x(), mesh.vertices[vb].y(), t);
    for (int d = 0; d < 2; ++d) {
      out[2 * va + d] += len * (ga[d] / 3.0 + gb[d] / 6.0);
      out[2 * vb + d] += len * (ga[d] / 6.0 + gb[d] / 3.0);
    }
  }
  return out;
}

inline Eigen::VectorXd solve_spd(const SpMat& K, const Eigen::VectorXd& rhs, double linear_tol,
                                 const char* what) {
  Eigen::SimplicialLDLT<SpMat> ldlt(K);
  if (ldlt.info() != Eigen::Success)
    throw LinearSolveFailure(std::string(what) + ": factorization failed");
  const Eigen::VectorXd x = ldlt.solve(rhs);
  const double res = (K * x - rhs).cwiseAbs().maxCoeff();
  if (!(res <= linear_tol * (1.0 + rhs.cwiseAbs().maxCoeff())))
    throw LinearSolveFailure(std::string(what) + ": residual " + std::to_string(res));
  return x;
}

// d L_mu/du from an already computed w = L_mu(u); avoids re-running the
// scalar root solve inside Newton loops.
inline double ell_reg_derivative_at(const ThermalLaw& law, double mu, double u, double w) {
  if (law.kind == LawKind::Linear) return (1.0 + mu) / (mu * mu + mu + 1.0);
  const double r = w * (1.0 + mu * mu) - mu * u;
  const double g = gamma_derivative(law, r);
  const double gm = std::isfinite(g) ? g / (1.0 + mu * g) : 1.0 / mu;
  return 1.0 / (mu + gm);
}

} // namespace detail

// Elliptic mollification of the initial entropy data: w0_mu solves
// (M + mu S) w0_mu = M w0 in the bulk, z0_mu the analog on the contact line,
// and theta0 = mu w0_mu + gamma_mu(w0_mu) nodally.
inline State build_initial_data(const Scenario& sc) {
  sc.validate();
  const Mesh& mesh = sc.mesh;
  const int n = mesh.n_vertices();
  const int nc = mesh.n_contact();
  const RegParams reg = sc.solver.reg();
  const ThermalLaw& law = sc.mat.thermal_law;

  State st;
  st.time = 0.0;

  const ScalarMatrices bulk = assemble_scalar(mesh);
  const ScalarMatrices cont = assemble_scalar_contact(mesh);
  const Eigen::VectorXd w0 = detail::nodal_scalar(mesh, sc.w0);
  const Eigen::VectorXd z0 = detail::contact_scalar(mesh, sc.z0);
  st.w = detail::solve_spd(SpMat(bulk.M + reg.mu * bulk.S), bulk.M * w0, sc.solver.linear_tol,
                           "initial bulk mollification");
  st.z = detail::solve_spd(SpMat(cont.M + reg.mu * cont.S), cont.M * z0, sc.solver.linear_tol,
                           "initial contact mollification");
  st.theta.resize(n);
  for (int i = 0; i < n; ++i) st.theta[i] = ell_reg_inverse(law, reg, st.w[i]);
  st.theta_s.resize(nc);
  for (int i = 0; i < nc; ++i) st.theta_s[i] = ell_reg_inverse(law, reg, st.z[i]);

  st.u = detail::nodal_vector(mesh, sc.u0);
  for (int v : mesh.gamma1_nodes) {
    if (std::abs(st.u[2 * v]) > 1e-12 || std::abs(st.u[2 * v + 1]) > 1e-12)
      throw ValidationError("initial displacement must vanish on the clamped boundary");
    st.u[2 * v] = st.u[2 * v + 1] = 0.0;
  }
  for (int i = 0; i < nc; ++i) {
    const int v = mesh.contact_nodes[i];
    const Eigen::Vector2d ui(st.u[2 * v], st.u[2 * v + 1]);
    if (ui.dot(mesh.contact_normals[i]) > 1e-10)
      throw ValidationError("initial displacement penetrates the support");
  }

  st.chi = detail::contact_scalar(mesh, sc.chi0);
  for (int i = 0; i < nc; ++i)
    if (st.chi[i] < 0.0 || st.chi[i] > 1.0)
      throw ValidationError("initial adhesion must lie in [0, 1] nodally");

  st.xi = Eigen::VectorXd::Zero(nc);
  const ContactReaction r = contact_reaction(mesh, st.u, st.chi, sc.mat);
  st.eta_n = r.eta_n;
  return st;
}

struct StepStats {
  int fp_iters = 0;
  int active_set_iters = 0;
  int newton_iters_bulk = 0;
  int newton_iters_surface = 0;
  double fp_residual = 0.0;
};

// One time step of the regularized system, solved by a fixed-point loop over
// three sub-solvers: mechanical block (displacement, then damage), bulk
// temperature, surface temperature. Nonlinear entropy terms are lumped so the
// Newton updates decouple nodally; latent and adhesive couplings are
// discretized so the energy ledger telescopes exactly (see diagnostics).
class Stepper {
public:
  explicit Stepper(Scenario sc) : sc_(std::move(sc)) {
    sc_.validate();
    const Mesh& mesh = sc_.mesh;
    bulk_ = assemble_scalar(mesh);
    cont_ = assemble_scalar_contact(mesh);
    auto ab = assemble_elastic(mesh, sc_.mat.tensors);
    A_ = std::move(ab.first);
    B_ = std::move(ab.second);
    A_raw_ = assemble_elastic(mesh, sc_.mat.tensors, false).first;
    auto cpl = assemble_coupling(mesh);
    D_ = std::move(cpl.D);
    T_ = std::move(cpl.T);
    K0_ = A_ + SpMat(B_ / sc_.solver.dt);
    Sc_dense_ = Eigen::MatrixXd(cont_.S);
    Mc_dense_ = Eigen::MatrixXd(cont_.M);
  }

  const Scenario& scenario() const { return sc_; }
  const Mesh& mesh() const { return sc_.mesh; }
  const ScalarMatrices& bulk_forms() const { return bulk_; }
  const ScalarMatrices& contact_forms() const { return cont_; }
  const SpMat& elastic_form() const { return A_; }
  // Same bilinear form without the clamped-row elimination; agrees with
  // elastic_form on admissible states, usable on arbitrary ones.
  const SpMat& elastic_form_raw() const { return A_raw_; }
  const SpMat& viscous_form() const { return B_; }
  const SpMat& divergence_form() const { return D_; }
  const SpMat& trace_form() const { return T_; }
  const StepStats& last_stats() const { return stats_; }

  // Contact heat-exchange form for a frozen damage iterate.
  SpMat exchange_form(const Eigen::VectorXd& chi) const {
    Eigen::VectorXd k(chi.size());
    for (Eigen::Index i = 0; i < chi.size(); ++i) k[i] = k_of_chi(sc_.mat, chi[i]);
    return weighted_contact_mass(sc_.mesh, k);
  }

  State initial_state() const { return build_initial_data(sc_); }

  struct Mechanical {
    Eigen::VectorXd u, chi, xi, eta_n;
  };

  // Displacement with active-set penalty contact, then damage as a
  // box-constrained QP. Temperatures are frozen at the caller's iterate.
  Mechanical solve_mechanical(const State& old, const Eigen::VectorXd& theta_star,
                              const Eigen::VectorXd& theta_s_star, double t_new) const {
    const Mesh& mesh = sc_.mesh;
    const MaterialParams& mat = sc_.mat;
    const double dt = sc_.solver.dt;
    const int n = mesh.n_vertices();
    const int nc = mesh.n_contact();

    // Adhesive spring: the lumped contact mass weighted by the old damage,
    // applied to the displacement midpoint (energy ledger telescopes then).
    Eigen::VectorXd c_half = Eigen::VectorXd::Zero(2 * n);
    for (int i = 0; i < nc; ++i) {
      const int v = mesh.contact_nodes[i];
      const double c = 0.5 * cont_.M_lump[i] * old.chi[i];
      c_half[2 * v] = c;
      c_half[2 * v + 1] = c;
    }

    Eigen::VectorXd rhs = B_ * old.u / dt + assemble_load(mesh, sc_.f, sc_.g, t_new) +
                          detail::contact_vector_load(mesh, sc_.g_c, t_new) -
                          D_.transpose() * theta_star - c_half.cwiseProduct(old.u);
    for (int v : mesh.gamma1_nodes) rhs[2 * v] = rhs[2 * v + 1] = 0.0;

    std::vector<char> active(nc, 0);
    for (int i = 0; i < nc; ++i) {
      const int v = mesh.contact_nodes[i];
      const Eigen::Vector2d ui(old.u[2 * v], old.u[2 * v + 1]);
      active[i] = ui.dot(mesh.contact_normals[i]) > 0.0 ? 1 : 0;
    }

    Mechanical out;
    bool settled = false;
    for (int pass = 0; pass < 60 && !settled; ++pass) {
      std::vector<Eigen::Triplet<double>> tc;
      for (int i = 0; i < nc; ++i) {
        const int v = mesh.contact_nodes[i];
        tc.emplace_back(2 * v, 2 * v, c_half[2 * v]);
        tc.emplace_back(2 * v + 1, 2 * v + 1, c_half[2 * v + 1]);
        const double pen = active[i] ? mat.kappa_pen * cont_.M_lump[i] : 0.0;
        const Eigen::Vector2d nrm = mesh.contact_normals[i];
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            tc.emplace_back(2 * v + a, 2 * v + b, pen * nrm[a] * nrm[b]);
      }
      SpMat Kc(2 * n, 2 * n);
      Kc.setFromTriplets(tc.begin(), tc.end());
      out.u = detail::solve_spd(SpMat(K0_ + Kc), rhs, sc_.solver.linear_tol, "momentum");
      settled = true;
      for (int i = 0; i < nc; ++i) {
        const int v = mesh.contact_nodes[i];
        const Eigen::Vector2d ui(out.u[2 * v], out.u[2 * v + 1]);
        const char now = ui.dot(mesh.contact_normals[i]) > 0.0 ? 1 : 0;
        if (now != active[i]) {
          active[i] = now;
          settled = false;
        }
      }
      ++stats_.active_set_iters;
    }
    if (!settled) throw ActiveSetNoConvergence("momentum: penalty active set did not settle");

    solve_damage(old, theta_s_star, out.u, t_new, out.chi, out.xi);
    out.eta_n = contact_reaction(mesh, out.u, out.chi, mat).eta_n;
    return out;
  }

  // Bulk temperature by Newton on the lumped nodal entropy nonlinearity.
  std::pair<Eigen::VectorXd, Eigen::VectorXd>
  solve_bulk_temperature(const State& old, const Eigen::VectorXd& u_rate,
                         const Eigen::VectorXd& chi_star, const Eigen::VectorXd& theta_s_star,
                         double t_new) const {
    const Mesh& mesh = sc_.mesh;
    const double dt = sc_.solver.dt;
    const double eps = sc_.solver.eps;
    const int n = mesh.n_vertices();
    const RegParams reg = sc_.solver.reg();
    const ThermalLaw& law = sc_.mat.thermal_law;

    const SpMat W = exchange_form(chi_star);
    const SpMat ExT = SpMat(T_.transpose() * W) * T_;
    const Eigen::VectorXd ex_rhs = T_.transpose() * (W * theta_s_star);
    Eigen::VectorXd rhs = ex_rhs + D_ * u_rate + bulk_.M_lump.cwiseProduct(old.w) / dt;
    if (sc_.h) rhs += bulk_.M * detail::nodal_scalar_t(mesh, sc_.h, t_new);
    if (sc_.b_c)
      rhs += T_.transpose() * (cont_.M * detail::contact_scalar_t(mesh, sc_.b_c, t_new));

    const SpMat J_lin = SpMat(eps / dt * (bulk_.M + bulk_.S)) + bulk_.S + ExT;
    const Eigen::VectorXd lin_rhs = eps / dt * ((bulk_.M + bulk_.S) * old.theta);

    Eigen::VectorXd theta = old.theta;
    Eigen::VectorXd w(n), dw(n);
    const auto residual = [&](const Eigen::VectorXd& th, Eigen::VectorXd& wv) {
      for (int i = 0; i < n; ++i) wv[i] = ell_reg_apply(law, reg, th[i]);
      return Eigen::VectorXd(J_lin * th + bulk_.M_lump.cwiseProduct(wv) / dt - lin_rhs - rhs);
    };
    Eigen::VectorXd F = residual(theta, w);
    const double tol = sc_.solver.newton_tol * (1.0 + rhs.cwiseAbs().maxCoeff());
    int it = 0;
    for (; it < sc_.solver.newton_max_iter; ++it) {
      if (F.cwiseAbs().maxCoeff() <= tol) break;
      for (int i = 0; i < n; ++i)
        dw[i] = detail::ell_reg_derivative_at(law, reg.mu, theta[i], w[i]);
      SpMat J = J_lin;
      J += SpMat(Eigen::VectorXd(bulk_.M_lump.cwiseProduct(dw) / dt).asDiagonal());
      const Eigen::VectorXd delta =
          detail::solve_spd(J, -F, sc_.solver.linear_tol, "bulk temperature newton");
      double step = 1.0;
      Eigen::VectorXd theta_try(n), w_try(n), F_try;
      for (int ls = 0; ls < 40; ++ls) {
        theta_try = theta + step * delta;
        F_try = residual(theta_try, w_try);
        if (F_try.norm() <= (1.0 - 1e-4 * step) * F.norm()) break;
        step *= 0.5;
      }
      theta = theta_try;
      w = w_try;
      F = F_try;
    }
    stats_.newton_iters_bulk += it;
    if (F.cwiseAbs().maxCoeff() > tol)
      throw NewtonNoConvergence("bulk temperature: residual " +
                                std::to_string(F.cwiseAbs().maxCoeff()) +
                                " after " + std::to_string(it) + " iterations; reduce dt");
    return {std::move(theta), std::move(w)};
  }

  // Surface temperature; the latent heat release of the damage increment
  // enters as a fixed source via the exact quadratic midpoint identity.
  std::pair<Eigen::VectorXd, Eigen::VectorXd>
  solve_surface_temperature(const State& old, const Eigen::VectorXd& theta_trace,
                            const Eigen::VectorXd& chi_new, double t_new) const {
    const Mesh& mesh = sc_.mesh;
    const double dt = sc_.solver.dt;
    const double eps = sc_.solver.eps;
    const int nc = mesh.n_contact();
    const RegParams reg = sc_.solver.reg();
    const ThermalLaw& law = sc_.mat.thermal_law;

    const Eigen::MatrixXd W = Eigen::MatrixXd(exchange_form(chi_new));
    Eigen::VectorXd rhs = W * theta_trace + cont_.M_lump.cwiseProduct(old.z) / dt;
    for (int i = 0; i < nc; ++i)
      rhs[i] += cont_.M_lump[i] / dt *
                (lambda_of(sc_.mat, chi_new[i]) - lambda_of(sc_.mat, old.chi[i]));
    if (sc_.h_s) rhs += Mc_dense_ * detail::contact_scalar_t(mesh, sc_.h_s, t_new);

    const Eigen::MatrixXd J_lin = eps / dt * (Mc_dense_ + Sc_dense_) + Sc_dense_ + W;
    const Eigen::VectorXd lin_rhs = eps / dt * ((Mc_dense_ + Sc_dense_) * old.theta_s);

    Eigen::VectorXd ts = old.theta_s;
    Eigen::VectorXd z(nc), dz(nc);
    const auto residual = [&](const Eigen::VectorXd& th, Eigen::VectorXd& zv) {
      for (int i = 0; i < nc; ++i) zv[i] = ell_reg_apply(law, reg, th[i]);
      return Eigen::VectorXd(J_lin * th + cont_.M_lump.cwiseProduct(zv) / dt - lin_rhs - rhs);
    };
    Eigen::VectorXd F = residual(ts, z);
    const double tol = sc_.solver.newton_tol * (1.0 + rhs.cwiseAbs().maxCoeff());
    int it = 0;
    for (; it < sc_.solver.newton_max_iter; ++it) {
      if (F.cwiseAbs().maxCoeff() <= tol) break;
      Eigen::MatrixXd J = J_lin;
      for (int i = 0; i < nc; ++i)
        J(i, i) += cont_.M_lump[i] / dt * detail::ell_reg_derivative_at(law, reg.mu, ts[i], z[i]);
      const Eigen::VectorXd delta = J.ldlt().solve(-F);
      double step = 1.0;
      Eigen::VectorXd ts_try(nc), z_try(nc), F_try;
      for (int ls = 0; ls < 40; ++ls) {
        ts_try = ts + step * delta;
        F_try = residual(ts_try, z_try);
        if (F_try.norm() <= (1.0 - 1e-4 * step) * F.norm()) break;
        step *= 0.5;
      }
      ts = ts_try;
      z = z_try;
      F = F_try;
    }
    stats_.newton_iters_surface += it;
    if (F.cwiseAbs().maxCoeff() > tol)
      throw NewtonNoConvergence("surface temperature: residual " +
                                std::to_string(F.cwiseAbs().maxCoeff()) +
                                " after " + std::to_string(it) + " iterations; reduce dt");
    return {std::move(ts), std::move(z)};
  }

  // Fixed-point loop over the three sub-solvers.
  State step(const State& old) const {
    stats_ = StepStats{};
    const double t_new = old.time + sc_.solver.dt;
    Eigen::VectorXd theta_star = old.theta;
    Eigen::VectorXd theta_s_star = old.theta_s;
    Eigen::VectorXd u_prev = old.u;
    Eigen::VectorXd chi_prev = old.chi;

    std::ostringstream trace;
    for (int it = 1; it <= sc_.solver.fp_max_iter; ++it) {
      Mechanical mech = solve_mechanical(old, theta_star, theta_s_star, t_new);
      auto tw = solve_bulk_temperature(old, (mech.u - old.u) / sc_.solver.dt, mech.chi,
                                       theta_s_star, t_new);
      auto sz = solve_surface_temperature(old, T_ * tw.first, mech.chi, t_new);

      const auto rel = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return (a - b).cwiseAbs().maxCoeff() / (1.0 + a.cwiseAbs().maxCoeff());
      };
      const double inc = std::max({rel(mech.u, u_prev), rel(mech.chi, chi_prev),
                                   rel(tw.first, theta_star), rel(sz.first, theta_s_star)});
      theta_star = std::move(tw.first);
      theta_s_star = std::move(sz.first);
      u_prev = mech.u;
      chi_prev = mech.chi;
      stats_.fp_iters = it;
      stats_.fp_residual = inc;
      trace << " it " << it << ": " << inc;

      if (inc <= sc_.solver.fp_tol) {
        State next;
        next.time = t_new;
        next.theta = std::move(theta_star);
        next.w = std::move(tw.second);
        next.theta_s = std::move(theta_s_star);
        next.z = std::move(sz.second);
        next.u = std::move(mech.u);
        next.chi = std::move(mech.chi);
        next.xi = std::move(mech.xi);
        next.eta_n = std::move(mech.eta_n);
        return next;
      }
    }
    throw FixedPointNoConvergence("step at t=" + std::to_string(t_new) +
                                  " did not converge; increments:" + trace.str());
  }

private:
  // Damage update: lumped implicit system with box constraint, solved by
  // projected Gauss-Seidel sweeps plus an exact active-set polish. The
  // multiplier xi is the nodal complementarity residual (density form).
  void solve_damage(const State& old, const Eigen::VectorXd& theta_s_star,
                    const Eigen::VectorXd& u_new, double t_new, Eigen::VectorXd& chi,
                    Eigen::VectorXd& xi) const {
    const Mesh& mesh = sc_.mesh;
    const MaterialParams& mat = sc_.mat;
    const double dt = sc_.solver.dt;
    const int nc = mesh.n_contact();

    // lambda'(chi_mid) theta_s splits into an explicit part at chi_old and an
    // implicit diagonal lam2 * chi_new * theta_s (quadratic midpoint rule).
    Eigen::MatrixXd K = Sc_dense_;
    Eigen::VectorXd rhs(nc);
    for (int i = 0; i < nc; ++i) {
      const double m = cont_.M_lump[i];
      K(i, i) += m / dt + m * mat.lam2 * theta_s_star[i];
      const int v = mesh.contact_nodes[i];
      const Eigen::Vector2d ui(u_new[2 * v], u_new[2 * v + 1]);
      rhs[i] = m * old.chi[i] / dt -
               m * (sigma_prime_eff(mat, old.chi[i]) +
                    (mat.lam1 + mat.lam2 * old.chi[i]) * theta_s_star[i] +
                    0.5 * ui.squaredNorm());
      if (!(K(i, i) > 0.0))
        throw SolverError("damage system lost positivity; reduce dt or lam2 coupling");
    }
    if (sc_.g_chi) {
      const Eigen::VectorXd gs = detail::contact_scalar_t(mesh, sc_.g_chi, t_new);
      for (int i = 0; i < nc; ++i) rhs[i] += cont_.M_lump[i] * gs[i];
    }

    chi = old.chi.cwiseMax(0.0).cwiseMin(1.0);
    for (int sweep = 0; sweep < 50; ++sweep) {
      for (int i = 0; i < nc; ++i) {
        const double off = K.row(i).dot(chi) - K(i, i) * chi[i];
        chi[i] = std::clamp((rhs[i] - off) / K(i, i), 0.0, 1.0);
      }
    }

    // Active-set polish: exact solve on the free set, clamp primal
    // violations, release bound nodes whose multiplier has the wrong sign.
    std::vector<int> bound(nc); // 0 free, -1 at lower, +1 at upper
    for (int i = 0; i < nc; ++i) bound[i] = chi[i] <= 0.0 ? -1 : (chi[i] >= 1.0 ? 1 : 0);
    bool done = false;
    for (int pass = 0; pass < 60 && !done; ++pass) {
      std::vector<int> free;
      for (int i = 0; i < nc; ++i) {
        chi[i] = bound[i] == -1 ? 0.0 : (bound[i] == 1 ? 1.0 : chi[i]);
        if (bound[i] == 0) free.push_back(i);
      }
      if (!free.empty()) {
        const Eigen::Index nf = static_cast<Eigen::Index>(free.size());
        Eigen::MatrixXd Kff(nf, nf);
        Eigen::VectorXd rf(nf);
        for (Eigen::Index a = 0; a < nf; ++a) {
          rf[a] = rhs[free[a]];
          for (int j = 0; j < nc; ++j)
            if (bound[j] == 1) rf[a] -= K(free[a], j);
          for (Eigen::Index b = 0; b < nf; ++b) Kff(a, b) = K(free[a], free[b]);
        }
        const Eigen::VectorXd cf = Kff.ldlt().solve(rf);
        for (Eigen::Index a = 0; a < nf; ++a) chi[free[a]] = cf[a];
      }

      done = true;
      for (int i = 0; i < nc; ++i) {
        if (bound[i] != 0) continue;
        if (chi[i] < 0.0) {
          bound[i] = -1;
          done = false;
        } else if (chi[i] > 1.0) {
          bound[i] = 1;
          done = false;
        }
      }
      if (!done) continue;

      const Eigen::VectorXd res = rhs - K * chi;
      for (int i = 0; i < nc; ++i) {
        if (bound[i] == -1 && res[i] > 1e-14) {
          bound[i] = 0;
          done = false;
        } else if (bound[i] == 1 && res[i] < -1e-14) {
          bound[i] = 0;
          done = false;
        }
      }
    }
    if (!done) throw ActiveSetNoConvergence("damage box constraint did not settle");

    xi = (rhs - K * chi).cwiseQuotient(cont_.M_lump);
    for (int i = 0; i < nc; ++i)
      if (bound[i] == 0) xi[i] = 0.0;
  }

  Scenario sc_;
  ScalarMatrices bulk_, cont_;
  SpMat A_, B_, A_raw_, D_, T_, K0_;
  Eigen::MatrixXd Sc_dense_, Mc_dense_;
  mutable StepStats stats_;
};

struct RunResult {
  std::vector<State> states;
  std::vector<StepStats> stats;
};

// March from t=0 to t_end (an integer multiple of dt) and record every state.
inline RunResult run(const Scenario& sc) {
  sc.validate();
  const long long n_steps = std::llround(sc.solver.t_end / sc.solver.dt);
  if (n_steps < 1 ||
      std::abs(static_cast<double>(n_steps) * sc.solver.dt - sc.solver.t_end) >
          1e-9 * std::max(1.0, sc.solver.t_end))
    throw ValidationError("run: t_end must be an integer multiple of dt");

  Stepper stepper(sc);
  RunResult out;
  out.states.reserve(static_cast<size_t>(n_steps) + 1);
  out.states.push_back(stepper.initial_state());
  for (long long k = 0; k < n_steps; ++k) {
    try {
      out.states.push_back(stepper.step(out.states.back()));
    } catch (const SolverError& e) {
      throw SolverError("step " + std::to_string(k + 1) + ": " + e.what());
    }
    out.stats.push_back(stepper.last_stats());
  }
  return out;
}

} // namespace tac
