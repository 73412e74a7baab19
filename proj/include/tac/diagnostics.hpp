#pragma once

#include <array>
#include <ostream>
#include <sstream>
#include <string>

#include <tac/stepper.hpp>

namespace tac {

// Per-step report. One CSV row per step; schema below (kReportCsvHeader).
struct EnergyReport {
  double time = 0.0;
  double psi_omega = 0.0;          // bulk free energy
  double psi_gammac = 0.0;         // contact-line free energy
  double diss_volume_rate = 0.0;   // conduction + viscous rate
  double diss_surface_rate = 0.0;  // surface conduction + damage rate
  double exchange_dissipation = 0.0;
  double lyapunov = 0.0;
  double lyapunov_residual = 0.0;
  double l1_theta = 0.0;
  double l1_theta_s = 0.0;
  double max_penetration = 0.0;
  double box_violation = 0.0;
  double moreau_budget = 0.0;
  double penalty_energy = 0.0;   // reported separately from the free energies
  double entropy_bulk = 0.0;     // integral of w - div u
  double entropy_surface = 0.0;  // integral of z - lambda(chi)
  int j_substitutions = 0;       // nodes reported through the conjugate form
};

struct FreeEnergies {
  double psi_omega = 0.0;
  double psi_gammac = 0.0;
  double penalty_energy = 0.0;
  int j_substitutions = 0;
};

struct Dissipations {
  double volume_rate = 0.0;
  double surface_rate = 0.0;
  double exchange = 0.0;
};

struct Monitor {
  double box_violation = 0.0;
  double max_penetration = 0.0;
  double positivity_slack_bulk = 0.0;     // min(theta - mu w)
  double positivity_slack_surface = 0.0;  // min(theta_s - mu z)
  double min_coercivity_slack = 0.0;
  double l1_theta = 0.0;
  double l1_theta_s = 0.0;
  double moreau_budget = 0.0;
};

// Itemized ledger of the discrete energy identity. Every term is nonnegative
// up to solver tolerances; their sum closes the balance
//   value_new - value_old + dissipation - work = residual.
struct LyapunovBalance {
  double value_old = 0.0;
  double value_new = 0.0;
  double dissipation = 0.0;
  double work = 0.0;
  double residual = 0.0;
  std::array<double, 15> terms{};
};

inline constexpr std::array<const char*, 15> kDissipationNames = {
    "bulk_conduction",    "exchange",        "surface_conduction", "viscous",
    "damage_rate",        "bulk_inertia",    "surface_inertia",    "bulk_mu_rate",
    "surface_mu_rate",    "bulk_bregman",    "surface_bregman",    "elastic_increment",
    "gradient_increment", "constraint_work", "penalty_slack"};

namespace detail {

// Lumped integral of the convex potential j over a nodal field; nodes outside
// the closed domain of j are reported through the conjugate form
// theta*w - j*(w), which coincides with j(theta) when w is a selection of
// l(theta).
inline double j_integral_lumped(const ThermalLaw& law, const Eigen::VectorXd& lump,
                                const Eigen::VectorXd& theta, const Eigen::VectorXd& w,
                                int& substitutions) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (theta[i] >= law.dom_lower())
      total += lump[i] * law.j(theta[i]);
    else {
      total += lump[i] * (theta[i] * w[i] - law.jstar(w[i]));
      ++substitutions;
    }
  }
  return total;
}

inline double moreau_budget_lumped(const ThermalLaw& law, const RegParams& reg,
                                   const Eigen::VectorXd& lump, const Eigen::VectorXd& w) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) total += lump[i] * jstar_moreau(law, reg, w[i]);
  return total;
}

inline double penalty_energy(const Mesh& mesh, const Eigen::VectorXd& u, double kappa,
                             const Eigen::VectorXd& lump) {
  double total = 0.0;
  for (int i = 0; i < mesh.n_contact(); ++i) {
    const int v = mesh.contact_nodes[i];
    const Eigen::Vector2d ui(u[2 * v], u[2 * v + 1]);
    const double gap = std::max(0.0, ui.dot(mesh.contact_normals[i]));
    total += 0.5 * kappa * lump[i] * gap * gap;
  }
  return total;
}

} // namespace detail

inline FreeEnergies free_energies(const Stepper& st, const State& s) {
  const Mesh& mesh = st.mesh();
  const MaterialParams& mat = st.scenario().mat;
  const int nc = mesh.n_contact();

  FreeEnergies out;
  // Bulk: theta div(u) + elastic energy - integral of j(theta).
  out.psi_omega = s.theta.dot(st.divergence_form() * s.u) +
                  0.5 * s.u.dot(st.elastic_form_raw() * s.u) -
                  detail::j_integral_lumped(mat.thermal_law, st.bulk_forms().M_lump, s.theta, s.w,
                                            out.j_substitutions);

  // Contact line: latent + cohesion + damage gradient + adhesive spring
  // - integral of j(theta_s).
  double surf = 0.5 * s.chi.dot(st.contact_forms().S * s.chi);
  for (int i = 0; i < nc; ++i) {
    const int v = mesh.contact_nodes[i];
    const Eigen::Vector2d ui(s.u[2 * v], s.u[2 * v + 1]);
    surf += st.contact_forms().M_lump[i] *
            (lambda_of(mat, s.chi[i]) * (s.theta_s[i] - mat.theta_eq) +
             mat.sigma_spec.antiderivative(s.chi[i]) + 0.5 * s.chi[i] * ui.squaredNorm());
  }
  out.psi_gammac = surf - detail::j_integral_lumped(mat.thermal_law, st.contact_forms().M_lump,
                                                    s.theta_s, s.z, out.j_substitutions);
  out.penalty_energy =
      detail::penalty_energy(mesh, s.u, mat.kappa_pen, st.contact_forms().M_lump);
  return out;
}

inline Dissipations dissipations(const Stepper& st, const State& old, const State& now) {
  const double dt = now.time - old.time;
  Dissipations out;
  out.volume_rate = now.theta.dot(st.bulk_forms().S * now.theta);
  out.surface_rate = now.theta_s.dot(st.contact_forms().S * now.theta_s);
  if (dt > 0.0) {
    const Eigen::VectorXd du = (now.u - old.u) / dt;
    const Eigen::VectorXd dchi = (now.chi - old.chi) / dt;
    out.volume_rate += du.dot(st.viscous_form() * du);
    out.surface_rate += dchi.dot(st.contact_forms().M * dchi);
  }
  const Eigen::VectorXd gap = st.trace_form() * now.theta - now.theta_s;
  out.exchange = gap.dot(st.exchange_form(now.chi) * gap);
  return out;
}

// Lyapunov functional: the quantity the scheme dissipates between steps.
inline double lyapunov_value(const Stepper& st, const State& s) {
  const Scenario& sc = st.scenario();
  const RegParams reg = sc.solver.reg();
  const ThermalLaw& law = sc.mat.thermal_law;
  const double eps = sc.solver.eps;
  const double mu = sc.solver.mu;
  const Eigen::VectorXd& ml = st.bulk_forms().M_lump;
  const Eigen::VectorXd& mlc = st.contact_forms().M_lump;

  double L = 0.5 * eps * (s.theta.dot(st.bulk_forms().M * s.theta) +
                          s.theta.dot(st.bulk_forms().S * s.theta) +
                          s.theta_s.dot(st.contact_forms().M * s.theta_s) +
                          s.theta_s.dot(st.contact_forms().S * s.theta_s));
  L += 0.5 * mu * (ml.cwiseProduct(s.w).dot(s.w) + mlc.cwiseProduct(s.z).dot(s.z));
  L += detail::moreau_budget_lumped(law, reg, ml, s.w);
  L += detail::moreau_budget_lumped(law, reg, mlc, s.z);
  L += 0.5 * s.u.dot(st.elastic_form() * s.u);
  L += 0.5 * s.chi.dot(st.contact_forms().S * s.chi);
  for (int i = 0; i < st.mesh().n_contact(); ++i) {
    const int v = st.mesh().contact_nodes[i];
    const Eigen::Vector2d ui(s.u[2 * v], s.u[2 * v + 1]);
    L += 0.5 * mlc[i] * s.chi[i] * ui.squaredNorm();
  }
  L += detail::penalty_energy(st.mesh(), s.u, sc.mat.kappa_pen, mlc);
  return L;
}

// Discrete energy balance between two consecutive states, assembled from the
// same forms the solvers used; see kDissipationNames for the term layout.
inline LyapunovBalance lyapunov_balance(const Stepper& st, const State& old, const State& now) {
  const Scenario& sc = st.scenario();
  const Mesh& mesh = st.mesh();
  const MaterialParams& mat = sc.mat;
  const RegParams reg = sc.solver.reg();
  const ThermalLaw& law = mat.thermal_law;
  const double dt = now.time - old.time;
  if (!(dt > 0.0)) throw ValidationError("lyapunov_balance: states must advance in time");
  const double eps = sc.solver.eps;
  const double mu = sc.solver.mu;
  const Eigen::VectorXd& ml = st.bulk_forms().M_lump;
  const Eigen::VectorXd& mlc = st.contact_forms().M_lump;
  const int nc = mesh.n_contact();

  LyapunovBalance out;
  out.value_old = lyapunov_value(st, old);
  out.value_new = lyapunov_value(st, now);

  const Eigen::VectorXd dtheta = now.theta - old.theta;
  const Eigen::VectorXd dtheta_s = now.theta_s - old.theta_s;
  const Eigen::VectorXd dw = now.w - old.w;
  const Eigen::VectorXd dz = now.z - old.z;
  const Eigen::VectorXd du = now.u - old.u;
  const Eigen::VectorXd dchi = now.chi - old.chi;

  auto& d = out.terms;
  d[0] = dt * now.theta.dot(st.bulk_forms().S * now.theta);
  const Eigen::VectorXd gap = st.trace_form() * now.theta - now.theta_s;
  d[1] = dt * gap.dot(st.exchange_form(now.chi) * gap);
  d[2] = dt * now.theta_s.dot(st.contact_forms().S * now.theta_s);
  d[3] = du.dot(st.viscous_form() * du) / dt;
  d[4] = mlc.cwiseProduct(dchi).dot(dchi) / dt;
  d[5] = 0.5 * eps * (dtheta.dot(st.bulk_forms().M * dtheta) +
                      dtheta.dot(st.bulk_forms().S * dtheta));
  d[6] = 0.5 * eps * (dtheta_s.dot(st.contact_forms().M * dtheta_s) +
                      dtheta_s.dot(st.contact_forms().S * dtheta_s));
  d[7] = 0.5 * mu * ml.cwiseProduct(dw).dot(dw);
  d[8] = 0.5 * mu * mlc.cwiseProduct(dz).dot(dz);
  // Bregman gaps of the Moreau budget; theta - mu w is the Yosida value the
  // Newton solves converged to.
  double breg = 0.0;
  for (Eigen::Index i = 0; i < dw.size(); ++i)
    breg += ml[i] * ((now.theta[i] - mu * now.w[i]) * dw[i] -
                     (jstar_moreau(law, reg, now.w[i]) - jstar_moreau(law, reg, old.w[i])));
  d[9] = breg;
  breg = 0.0;
  for (int i = 0; i < nc; ++i)
    breg += mlc[i] * ((now.theta_s[i] - mu * now.z[i]) * dz[i] -
                      (jstar_moreau(law, reg, now.z[i]) - jstar_moreau(law, reg, old.z[i])));
  d[10] = breg;
  d[11] = 0.5 * du.dot(st.elastic_form() * du);
  d[12] = 0.5 * dchi.dot(st.contact_forms().S * dchi);
  d[13] = mlc.cwiseProduct(now.xi).dot(dchi);
  // Penalty convexity slack: force work minus the stored-energy increment.
  double pen_work = 0.0;
  for (int i = 0; i < nc; ++i) {
    const int v = mesh.contact_nodes[i];
    const Eigen::Vector2d dui(du[2 * v], du[2 * v + 1]);
    pen_work += mlc[i] * now.eta_n[i] * dui.dot(mesh.contact_normals[i]);
  }
  d[14] = pen_work - (detail::penalty_energy(mesh, now.u, mat.kappa_pen, mlc) -
                      detail::penalty_energy(mesh, old.u, mat.kappa_pen, mlc));
  for (double t : d) out.dissipation += t;

  double work = 0.0;
  if (sc.h)
    work += dt * now.theta.dot(st.bulk_forms().M * detail::nodal_scalar_t(mesh, sc.h, now.time));
  if (sc.b_c)
    work += dt * now.theta.dot(st.trace_form().transpose() *
                               (st.contact_forms().M *
                                detail::contact_scalar_t(mesh, sc.b_c, now.time)));
  if (sc.f || sc.g) work += du.dot(assemble_load(mesh, sc.f, sc.g, now.time));
  if (sc.g_c) work += du.dot(detail::contact_vector_load(mesh, sc.g_c, now.time));
  if (sc.h_s)
    work += dt * now.theta_s.dot(st.contact_forms().M *
                                 detail::contact_scalar_t(mesh, sc.h_s, now.time));
  if (sc.g_chi)
    work += mlc.cwiseProduct(detail::contact_scalar_t(mesh, sc.g_chi, now.time)).dot(dchi);
  for (int i = 0; i < nc; ++i)
    work -= mlc[i] * sigma_prime_eff(mat, old.chi[i]) * dchi[i];
  out.work = work;

  out.residual = out.value_new - out.value_old + out.dissipation - out.work;
  return out;
}

inline Monitor monitor(const Stepper& st, const State& s) {
  const Scenario& sc = st.scenario();
  const RegParams reg = sc.solver.reg();
  const ThermalLaw& law = sc.mat.thermal_law;
  const double mu = sc.solver.mu;
  const Mesh& mesh = st.mesh();
  const Eigen::VectorXd& ml = st.bulk_forms().M_lump;
  const Eigen::VectorXd& mlc = st.contact_forms().M_lump;

  Monitor out;
  out.box_violation = std::max(0.0, std::max((-s.chi).maxCoeff(),
                                             (s.chi.array() - 1.0).maxCoeff()));
  for (int i = 0; i < mesh.n_contact(); ++i) {
    const int v = mesh.contact_nodes[i];
    const Eigen::Vector2d ui(s.u[2 * v], s.u[2 * v + 1]);
    out.max_penetration =
        std::max(out.max_penetration, std::max(0.0, ui.dot(mesh.contact_normals[i])));
  }
  out.positivity_slack_bulk = (s.theta - mu * s.w).minCoeff();
  out.positivity_slack_surface = (s.theta_s - mu * s.z).minCoeff();
  double slack = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < s.theta.size(); ++i)
    slack = std::min(slack, coercivity_bound(law, reg, s.theta[i]));
  for (Eigen::Index i = 0; i < s.theta_s.size(); ++i)
    slack = std::min(slack, coercivity_bound(law, reg, s.theta_s[i]));
  out.min_coercivity_slack = slack;
  out.l1_theta = ml.cwiseProduct(s.theta.cwiseAbs()).sum();
  out.l1_theta_s = mlc.cwiseProduct(s.theta_s.cwiseAbs()).sum();
  out.moreau_budget = detail::moreau_budget_lumped(law, reg, ml, s.w) +
                      detail::moreau_budget_lumped(law, reg, mlc, s.z);
  return out;
}

// Report for the initial state: energies and monitor only, rates zero.
inline EnergyReport make_energy_report(const Stepper& st, const State& s) {
  EnergyReport r;
  r.time = s.time;
  const FreeEnergies fe = free_energies(st, s);
  r.psi_omega = fe.psi_omega;
  r.psi_gammac = fe.psi_gammac;
  r.penalty_energy = fe.penalty_energy;
  r.j_substitutions = fe.j_substitutions;
  r.lyapunov = lyapunov_value(st, s);
  const Monitor mon = monitor(st, s);
  r.l1_theta = mon.l1_theta;
  r.l1_theta_s = mon.l1_theta_s;
  r.max_penetration = mon.max_penetration;
  r.box_violation = mon.box_violation;
  r.moreau_budget = mon.moreau_budget;
  r.entropy_bulk = st.bulk_forms().M_lump.dot(s.w) -
                   (st.divergence_form() * s.u).sum();
  double es = 0.0;
  for (int i = 0; i < st.mesh().n_contact(); ++i)
    es += st.contact_forms().M_lump[i] *
          (s.z[i] - lambda_of(st.scenario().mat, s.chi[i]));
  r.entropy_surface = es;
  return r;
}

inline EnergyReport make_energy_report(const Stepper& st, const State& old, const State& now) {
  EnergyReport r = make_energy_report(st, now);
  const Dissipations di = dissipations(st, old, now);
  r.diss_volume_rate = di.volume_rate;
  r.diss_surface_rate = di.surface_rate;
  r.exchange_dissipation = di.exchange;
  const LyapunovBalance bal = lyapunov_balance(st, old, now);
  r.lyapunov = bal.value_new;
  r.lyapunov_residual = bal.residual;
  return r;
}

// CSV schema, versioned; bump the leading tag when columns change.
inline constexpr const char* kReportCsvSchema = "report-v1";
inline constexpr const char* kReportCsvHeader =
    "time,psi_omega,psi_gammac,diss_volume_rate,diss_surface_rate,exchange_dissipation,"
    "lyapunov,lyapunov_residual,l1_theta,l1_theta_s,max_penetration,box_violation,"
    "moreau_budget,penalty_energy,entropy_bulk,entropy_surface,j_substitutions";

inline void write_report_row(std::ostream& os, const EnergyReport& r) {
  std::ostringstream line;
  line.precision(17);
  line << r.time << ',' << r.psi_omega << ',' << r.psi_gammac << ',' << r.diss_volume_rate << ','
       << r.diss_surface_rate << ',' << r.exchange_dissipation << ',' << r.lyapunov << ','
       << r.lyapunov_residual << ',' << r.l1_theta << ',' << r.l1_theta_s << ','
       << r.max_penetration << ',' << r.box_violation << ',' << r.moreau_budget << ','
       << r.penalty_energy << ',' << r.entropy_bulk << ',' << r.entropy_surface << ','
       << r.j_substitutions;
  os << line.str() << '\n';
}

} // namespace tac
