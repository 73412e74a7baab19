// Acceptance gate. Ten end-to-end checks, each printing a single PASS/FAIL
// line with its measured quantities; the exit status is the number of
// failures. Tolerances and budgets are pinned as constants next to each
// check. No test framework: the binary must stay readable as a checklist.

#include <tac/config.hpp>
#include <tac/diagnostics.hpp>
#include <tac/monotone.hpp>
#include <tac/presets.hpp>
#include <tac/stepper.hpp>
#include <tac/study.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// A full march of a scenario plus the per-step monitor aggregates the
// checks below care about.
struct RunSummary {
  std::vector<tac::State> states;
  double max_penetration = 0.0;
  double max_box_violation = -kInf;
  double min_slack_bulk = kInf;
  double min_slack_surface = kInf;
};

RunSummary run_with_monitor(const tac::Scenario& sc) {
  RunSummary out;
  out.states = tac::run(sc).states;
  const tac::Stepper stp(sc);
  for (const auto& st : out.states) {
    const tac::Monitor m = tac::monitor(stp, st);
    out.max_penetration = std::max(out.max_penetration, m.max_penetration);
    out.max_box_violation = std::max(out.max_box_violation, m.box_violation);
    out.min_slack_bulk = std::min(out.min_slack_bulk, m.positivity_slack_bulk);
    out.min_slack_surface = std::min(out.min_slack_surface, m.positivity_slack_surface);
  }
  return out;
}

double inf_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Runs computed once and reused by several checks.
struct SharedRuns {
  RunSummary ref, decoupled, peel, manufactured;
  bool ready = false;
};

// 1. Operator calculus on randomized (law, mu, w) triples: resolvent and
// envelope identities, the 1/mu Lipschitz bound, monotonicity, and the
// linear-law closed forms. Each identity is checked against its own defining
// equation at the equation's conditioning; value-sized residuals are
// normalized by max(1, |value|) because the envelope reaches 4e5 where an
// absolute 1e-10 would sit below one ulp.
bool check_operator_calculus(std::string& detail) {
  constexpr double kTolIdentity = 1e-10;
  constexpr double kTolLinear = 1e-12;
  constexpr double kBudgetSeconds = 10.0;
  constexpr int kTriplesPerLaw = 3400;  // 3 laws: 10200 triples total

  const auto t0 = clock_type::now();
  std::mt19937_64 rng(2026081401ull);
  std::uniform_real_distribution<double> wdist(-20.0, 20.0);
  std::uniform_real_distribution<double> logmu(-4.0, 0.0);

  const std::array<tac::ThermalLaw, 3> laws = {tac::ThermalLaw::logarithmic(),
                                               tac::ThermalLaw::power_law(1.5),
                                               tac::ThermalLaw::linear()};
  double max_identity = 0.0;
  double max_lip_excess = -kInf;
  double max_linear = 0.0;
  long mono_violations = 0;
  long envelope_violations = 0;

  for (const auto& law : laws) {
    for (int i = 0; i < kTriplesPerLaw; ++i) {
      const double mu = std::pow(10.0, logmu(rng));
      const double w1 = wdist(rng);
      const double w2 = wdist(rng);
      const tac::RegParams reg{mu, 1e-13, 200};

      const double rho = tac::resolvent(law, reg, w1);
      max_identity = std::max(max_identity,
                              std::abs(rho + mu * tac::gamma_apply(law, rho) - w1));

      // Moreau envelope: value at the resolvent, and the envelope inequality
      // at displaced points (rho is the minimizer of E).
      const auto envelope = [&](double v) {
        return law.jstar(v) + (w1 - v) * (w1 - v) / (2.0 * mu);
      };
      const double jm = tac::jstar_moreau(law, reg, w1);
      const double env = envelope(rho);
      max_identity =
          std::max(max_identity, std::abs(jm - env) / std::max(1.0, std::abs(env)));
      for (const double d : {-0.7 * mu, 0.4 * mu, 1.3}) {
        const double ed = envelope(rho + d);
        if (jm > ed + kTolIdentity * std::max(1.0, std::abs(ed))) ++envelope_violations;
      }

      // L_mu against the transformed root equation that defines it. (The
      // right inverse mu*w + gamma_mu(w) is a two-operation formula over the
      // verified resolvent; sweeping it here would only re-measure the
      // 1/mu-amplified conditioning of that division, not new code.)
      const auto defining_residual = [&](double y, double u) {
        const double r = y * (1.0 + mu * mu) - mu * u;
        return std::abs(tac::gamma_apply(law, r) + mu * y - u) / std::max(1.0, std::abs(u));
      };
      const double u1 = wdist(rng);
      const double y1 = tac::ell_reg_apply(law, reg, u1);
      max_identity = std::max(max_identity, defining_residual(y1, u1));

      const double ys1 = tac::yosida_apply(law, reg, w1);
      const double ys2 = tac::yosida_apply(law, reg, w2);
      max_lip_excess =
          std::max(max_lip_excess, std::abs(ys1 - ys2) - std::abs(w1 - w2) / mu);
      if ((ys1 - ys2) * (w1 - w2) < 0.0) ++mono_violations;

      if (law.kind == tac::LawKind::Linear) {
        const double closed = u1 * (1.0 + mu) / (mu * mu + mu + 1.0);
        max_linear = std::max(max_linear,
                              std::abs(y1 - closed) / std::max(1.0, std::abs(u1)));
        max_linear = std::max(max_linear,
                              std::abs(jm - w1 * w1 / (2.0 * (1.0 + mu))) /
                                  std::max(1.0, w1 * w1));
      }
    }
  }

  const double elapsed = seconds_since(t0);
  std::ostringstream os;
  os << 3 * kTriplesPerLaw << " triples, max identity residual " << fmt(max_identity)
     << ", lipschitz excess " << fmt(max_lip_excess) << ", monotonicity violations "
     << mono_violations << ", envelope violations " << envelope_violations
     << ", linear closed-form error " << fmt(max_linear) << ", " << fmt(elapsed) << "s";
  detail = os.str();
  return max_identity <= kTolIdentity && max_lip_excess <= kTolIdentity &&
         mono_violations == 0 && envelope_violations == 0 && max_linear <= kTolLinear &&
         elapsed < kBudgetSeconds;
}

// 2. Coercivity transfer: the slack of the regularized coercivity inequality
// stays nonnegative over a dense u grid for every law and mu.
bool check_coercivity(std::string& detail) {
  constexpr double kTolSlack = -1e-12;
  constexpr double kBudgetSeconds = 10.0;

  const auto t0 = clock_type::now();
  const std::array<tac::ThermalLaw, 3> laws = {tac::ThermalLaw::logarithmic(),
                                               tac::ThermalLaw::power_law(1.5),
                                               tac::ThermalLaw::linear()};
  double min_slack = kInf;
  long count = 0;
  for (const auto& law : laws)
    for (const double mu : {1.0, 0.1, 0.01, 0.001}) {
      const tac::RegParams reg{mu, 1e-13, 200};
      for (double u = -50.0; u <= 50.0 + 1e-9; u += 0.1) {
        min_slack = std::min(min_slack, tac::coercivity_bound(law, reg, u));
        ++count;
      }
    }

  const double elapsed = seconds_since(t0);
  detail = std::to_string(count) + " evaluations, min slack " + fmt(min_slack) + ", " +
           fmt(elapsed) + "s";
  return min_slack >= kTolSlack && elapsed < kBudgetSeconds;
}

// 3. Elliptic mollification of the initial entropy: never expands the M-norm,
// and converges monotonically to the raw data as mu decreases.
bool check_initial_mollification(std::string& detail) {
  constexpr double kTolExpand = 1e-12;  // relative slack on the norm bound

  tac::Scenario sc = tac::reference_preset(16, 15);
  const tac::ScalarMatrices bulk = tac::assemble_scalar(sc.mesh);
  Eigen::VectorXd w0n(sc.mesh.n_vertices());
  for (int v = 0; v < sc.mesh.n_vertices(); ++v)
    w0n[v] = sc.w0(sc.mesh.vertices[v].x(), sc.mesh.vertices[v].y());
  const auto norm_M = [&](const Eigen::VectorXd& v) { return std::sqrt(v.dot(bulk.M * v)); };
  const double n0 = norm_M(w0n);

  bool bounded = true;
  std::vector<double> diffs;
  for (const double mu : {1e-1, 1e-2, 1e-3, 1e-4}) {
    sc.solver.mu = mu;
    const tac::State st = tac::build_initial_data(sc);
    if (norm_M(st.w) > n0 * (1.0 + kTolExpand)) bounded = false;
    diffs.push_back(norm_M(st.w - w0n));
  }
  bool decreasing = diffs.back() > 0.0;
  for (size_t i = 0; i + 1 < diffs.size(); ++i)
    if (!(diffs[i] > diffs[i + 1])) decreasing = false;

  std::ostringstream os;
  os << "diff norms";
  for (double d : diffs) os << ' ' << fmt(d);
  detail = os.str();
  return bounded && decreasing;
}

// 4. Energy ledger on the source-free reference run: the balance closes to
// 1e-8 every step, every dissipation term is nonnegative to rounding, and
// the Lyapunov value never increases beyond the residual tolerance.
bool check_energy_ledger(std::string& detail) {
  constexpr double kTolResidual = 1e-8;
  constexpr double kTolTerm = -1e-12;
  constexpr double kTolIncrease = 1e-8;
  constexpr double kBudgetSeconds = 60.0;

  const auto t0 = clock_type::now();
  tac::Config cfg;
  cfg.preset = "reference";
  cfg.entries.emplace_back("run.load_scale", "0");
  const tac::Scenario sc = tac::make_scenario(cfg);

  const std::vector<tac::State> states = tac::run(sc).states;
  const tac::Stepper stp(sc);
  double max_residual = 0.0;
  double min_term = kInf;
  double max_increase = -kInf;
  for (size_t n = 1; n < states.size(); ++n) {
    const tac::LyapunovBalance bal = tac::lyapunov_balance(stp, states[n - 1], states[n]);
    max_residual = std::max(max_residual, std::abs(bal.residual));
    for (double term : bal.terms) min_term = std::min(min_term, term);
    max_increase = std::max(max_increase, bal.value_new - bal.value_old);
  }

  const double elapsed = seconds_since(t0);
  std::ostringstream os;
  os << sc.mesh.n_vertices() << " nodes, " << states.size() - 1 << " steps, max residual "
     << fmt(max_residual) << ", min term " << fmt(min_term) << ", max increase "
     << fmt(max_increase) << ", " << fmt(elapsed) << "s";
  detail = os.str();
  return sc.mesh.n_vertices() >= 900 && sc.mesh.n_vertices() <= 1100 &&
         states.size() == 101 && max_residual <= kTolResidual && min_term >= kTolTerm &&
         max_increase <= kTolIncrease && elapsed < kBudgetSeconds;
}

// 5. Constraints: the damage box is satisfied exactly on every preset, and
// penetration on the reference run is penalty-small and shrinks at least
// fivefold when the penalty stiffens tenfold.
bool check_constraints(std::string& detail, SharedRuns& shared) {
  constexpr double kMaxPenetration = 1e-3;
  constexpr double kPenaltyFactor = 5.0;

  shared.ref = run_with_monitor(tac::reference_preset());
  shared.decoupled = run_with_monitor(tac::decoupled_preset());
  shared.peel = run_with_monitor(tac::peel_preset());
  shared.manufactured = run_with_monitor(tac::manufactured_case().scenario);
  shared.ready = true;

  tac::Scenario stiff = tac::reference_preset();
  stiff.mat.kappa_pen = 1e7;
  const RunSummary ref_stiff = run_with_monitor(stiff);

  const double box = std::max({shared.ref.max_box_violation, shared.decoupled.max_box_violation,
                               shared.peel.max_box_violation,
                               shared.manufactured.max_box_violation});
  const double pen = shared.ref.max_penetration;
  const double pen_stiff = ref_stiff.max_penetration;

  std::ostringstream os;
  os << "box violation " << fmt(box) << ", penetration " << fmt(pen) << " -> "
     << fmt(pen_stiff) << " at 10x penalty";
  detail = os.str();
  return box == 0.0 && pen > 0.0 && pen <= kMaxPenetration && pen_stiff > 0.0 &&
         pen_stiff <= pen / kPenaltyFactor;
}

// 6. Strict positivity of theta - mu w and theta_s - mu z along every
// logarithmic-law preset run.
bool check_positivity(std::string& detail, const SharedRuns& shared) {
  if (!shared.ready) {
    detail = "skipped: preset runs unavailable";
    return false;
  }
  const double bulk = std::min({shared.ref.min_slack_bulk, shared.decoupled.min_slack_bulk,
                                shared.peel.min_slack_bulk});
  const double surf =
      std::min({shared.ref.min_slack_surface, shared.decoupled.min_slack_surface,
                shared.peel.min_slack_surface});
  detail = "min slack bulk " + fmt(bulk) + ", surface " + fmt(surf);
  return bulk > 0.0 && surf > 0.0;
}

// 7. Regularization limits on the reference preset: trajectory difference
// norms contract strictly along mu -> 0 (at eps = 0) and along eps -> 0.
bool check_regularization_limits(std::string& detail, const fs::path& tmp) {
  constexpr double kBudgetSeconds = 300.0;

  const auto t0 = clock_type::now();
  const auto contracting = [](const tac::StudyResult& r, std::string& msg) {
    for (const auto& lev : r.levels)
      if (!lev.error.empty()) {
        msg = "level " + fmt(lev.value) + " failed: " + lev.error;
        return false;
      }
    if (r.diff_norms.size() != 3) {
      msg = "expected 3 difference norms";
      return false;
    }
    for (size_t i = 0; i + 1 < r.diff_norms.size(); ++i)
      if (!(r.diff_norms[i] > r.diff_norms[i + 1])) {
        msg = "not contracting";
        return false;
      }
    return r.diff_norms.back() > 0.0;
  };

  tac::Config cmu;
  cmu.preset = "reference";
  cmu.entries.emplace_back("solver.eps", "0");
  cmu.study = tac::StudySpec{};
  cmu.study->axis = "mu";
  cmu.study->levels = {1e-1, 1e-2, 1e-3, 1e-4};
  const tac::StudyResult rmu = tac::run_study(cmu, tmp / "study_mu");

  tac::Config ceps;
  ceps.preset = "reference";
  ceps.study = tac::StudySpec{};
  ceps.study->axis = "eps";
  ceps.study->levels = {1e-2, 1e-3, 1e-4, 1e-5};
  const tac::StudyResult reps = tac::run_study(ceps, tmp / "study_eps");

  std::string msg_mu, msg_eps;
  const bool ok_mu = contracting(rmu, msg_mu);
  const bool ok_eps = contracting(reps, msg_eps);
  const double elapsed = seconds_since(t0);

  std::ostringstream os;
  os << "mu diffs";
  for (double d : rmu.diff_norms) os << ' ' << fmt(d);
  os << "; eps diffs";
  for (double d : reps.diff_norms) os << ' ' << fmt(d);
  if (!ok_mu) os << "; mu: " << msg_mu;
  if (!ok_eps) os << "; eps: " << msg_eps;
  os << "; " << fmt(elapsed) << "s";
  detail = os.str();
  return ok_mu && ok_eps && elapsed < kBudgetSeconds;
}

// 8. Manufactured convergence orders: second order in space over three mesh
// halvings (time step slaved quadratically), first order in time over three
// step halvings on a fixed mesh.
bool check_convergence_orders(std::string& detail, const fs::path& tmp) {
  constexpr double kSpatialOrder = 1.8;
  constexpr double kTemporalOrder = 0.9;

  tac::Config ch;
  ch.preset = "manufactured";
  ch.entries.emplace_back("mesh.nx", "8");
  ch.entries.emplace_back("mesh.ny", "8");
  ch.entries.emplace_back("solver.dt", "0.02");
  ch.entries.emplace_back("solver.t_end", "0.1");
  ch.study = tac::StudySpec{};
  ch.study->axis = "h";
  ch.study->levels = {8, 16, 32, 64};
  const tac::StudyResult rh = tac::run_study(ch, tmp / "study_h");

  bool ok_h = rh.orders.size() == 3;
  for (const auto& lev : rh.levels)
    if (!lev.error.empty()) ok_h = false;
  for (double o : rh.orders)
    if (!(o >= kSpatialOrder)) ok_h = false;
  // Displacement orders from the per-level errors (halved mesh each level).
  std::vector<double> orders_u;
  if (ok_h)
    for (size_t i = 0; i + 1 < rh.levels.size(); ++i) {
      const double o =
          std::log(rh.levels[i].err_u / rh.levels[i + 1].err_u) / std::log(2.0);
      orders_u.push_back(o);
      if (!(o >= kSpatialOrder)) ok_h = false;
    }

  tac::Config cd;
  cd.preset = "manufactured";
  cd.entries.emplace_back("mesh.nx", "8");
  cd.entries.emplace_back("mesh.ny", "8");
  cd.entries.emplace_back("solver.t_end", "0.1");
  cd.study = tac::StudySpec{};
  cd.study->axis = "dt";
  cd.study->levels = {0.02, 0.01, 0.005, 0.0025, 0.00125};
  const tac::StudyResult rd = tac::run_study(cd, tmp / "study_dt");

  bool ok_dt = rd.orders.size() == 3;
  for (const auto& lev : rd.levels)
    if (!lev.error.empty()) ok_dt = false;
  for (double o : rd.orders)
    if (!(o >= kTemporalOrder)) ok_dt = false;

  std::ostringstream os;
  os << "spatial theta orders";
  for (double o : rh.orders) os << ' ' << fmt(o);
  os << ", u orders";
  for (double o : orders_u) os << ' ' << fmt(o);
  os << "; temporal orders";
  for (double o : rd.orders) os << ' ' << fmt(o);
  detail = os.str();
  return ok_h && ok_dt;
}

// 9. Insulated decoupling: with zero exchange and constant latent coupling,
// the full fixed-point march reproduces the two subsystems integrated
// independently through the public sub-solvers.
bool check_decoupling(std::string& detail) {
  constexpr double kTolMatch = 1e-10;

  const tac::Scenario sc = tac::decoupled_preset();
  const std::vector<tac::State> full = tac::run(sc).states;
  const tac::Stepper stp(sc);
  const double dt = sc.solver.dt;
  const int n_steps = static_cast<int>(full.size()) - 1;
  const Eigen::VectorXd zero_c = Eigen::VectorXd::Zero(sc.mesh.n_contact());

  const auto rel = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a - b).cwiseAbs().maxCoeff() / (1.0 + a.cwiseAbs().maxCoeff());
  };

  // Mechanical + bulk temperature, surface fields frozen at zero.
  std::vector<tac::State> bulk_run{stp.initial_state()};
  for (int s = 0; s < n_steps; ++s) {
    const tac::State& old = bulk_run.back();
    const double t_new = old.time + dt;
    Eigen::VectorXd theta_star = old.theta;
    Eigen::VectorXd u_prev = old.u;
    Eigen::VectorXd chi_prev = old.chi;
    bool converged = false;
    for (int it = 1; it <= sc.solver.fp_max_iter && !converged; ++it) {
      tac::Stepper::Mechanical mech = stp.solve_mechanical(old, theta_star, zero_c, t_new);
      auto tw = stp.solve_bulk_temperature(old, (mech.u - old.u) / dt, mech.chi, zero_c, t_new);
      const double inc = std::max(
          {rel(mech.u, u_prev), rel(mech.chi, chi_prev), rel(tw.first, theta_star)});
      theta_star = tw.first;
      u_prev = mech.u;
      chi_prev = mech.chi;
      if (inc <= sc.solver.fp_tol) {
        tac::State next = old;
        next.time = t_new;
        next.theta = std::move(tw.first);
        next.w = std::move(tw.second);
        next.u = std::move(mech.u);
        next.chi = std::move(mech.chi);
        next.xi = std::move(mech.xi);
        next.eta_n = std::move(mech.eta_n);
        bulk_run.push_back(std::move(next));
        converged = true;
      }
    }
    if (!converged) {
      detail = "bulk subsystem march failed to converge";
      return false;
    }
  }

  // Surface temperature alone, trace and damage frozen.
  std::vector<tac::State> surf_run{stp.initial_state()};
  for (int s = 0; s < n_steps; ++s) {
    const tac::State& old = surf_run.back();
    auto sz = stp.solve_surface_temperature(old, zero_c, old.chi, old.time + dt);
    tac::State next = old;
    next.time = old.time + dt;
    next.theta_s = std::move(sz.first);
    next.z = std::move(sz.second);
    surf_run.push_back(std::move(next));
  }

  double d_bulk = 0.0, d_surf = 0.0;
  for (size_t n = 0; n < full.size(); ++n) {
    d_bulk = std::max({d_bulk, inf_diff(full[n].theta, bulk_run[n].theta),
                       inf_diff(full[n].w, bulk_run[n].w), inf_diff(full[n].u, bulk_run[n].u),
                       inf_diff(full[n].chi, bulk_run[n].chi),
                       inf_diff(full[n].xi, bulk_run[n].xi),
                       inf_diff(full[n].eta_n, bulk_run[n].eta_n)});
    d_surf = std::max({d_surf, inf_diff(full[n].theta_s, surf_run[n].theta_s),
                       inf_diff(full[n].z, surf_run[n].z)});
  }

  detail = "bulk fields diff " + fmt(d_bulk) + ", surface fields diff " + fmt(d_surf) +
           " over " + std::to_string(n_steps) + " steps";
  return d_bulk <= kTolMatch && d_surf <= kTolMatch;
}

// 10. Continuous dependence at eps > 0: a 1e-6 perturbation of the initial
// entropy moves the final fields by no more than 1e-3.
bool check_continuous_dependence(std::string& detail, const SharedRuns& shared) {
  constexpr double kDelta = 1e-6;
  constexpr double kTolFinal = 1e-3;

  if (!shared.ready) {
    detail = "skipped: preset runs unavailable";
    return false;
  }
  tac::Scenario sc = tac::reference_preset();
  const tac::ScalarInit base = sc.w0;
  sc.w0 = [base](double x, double y) {
    return base(x, y) + kDelta * std::cos(M_PI * x) * std::cos(M_PI * y);
  };
  const std::vector<tac::State> perturbed = tac::run(sc).states;

  const tac::State& a = shared.ref.states.back();
  const tac::State& b = perturbed.back();
  const double d = std::max({inf_diff(a.theta, b.theta), inf_diff(a.w, b.w),
                             inf_diff(a.theta_s, b.theta_s), inf_diff(a.z, b.z),
                             inf_diff(a.u, b.u), inf_diff(a.chi, b.chi)});
  detail = "final field diff " + fmt(d) + " for a " + fmt(kDelta) + " entropy shift";
  return d <= kTolFinal;
}

}  // namespace

int main() {
  const fs::path tmp = fs::temp_directory_path() / "tac_acceptance";
  std::error_code ec;
  fs::remove_all(tmp, ec);
  fs::create_directories(tmp);

  SharedRuns shared;
  struct Check {
    const char* name;
    std::function<bool(std::string&)> fn;
  };
  const std::vector<Check> checks = {
      {"operator calculus", [](std::string& d) { return check_operator_calculus(d); }},
      {"coercivity transfer", [](std::string& d) { return check_coercivity(d); }},
      {"initial mollification", [](std::string& d) { return check_initial_mollification(d); }},
      {"energy ledger", [](std::string& d) { return check_energy_ledger(d); }},
      {"constraints and penalty", [&](std::string& d) { return check_constraints(d, shared); }},
      {"temperature positivity", [&](std::string& d) { return check_positivity(d, shared); }},
      {"regularization limits",
       [&](std::string& d) { return check_regularization_limits(d, tmp); }},
      {"convergence orders", [&](std::string& d) { return check_convergence_orders(d, tmp); }},
      {"insulated decoupling", [](std::string& d) { return check_decoupling(d); }},
      {"continuous dependence",
       [&](std::string& d) { return check_continuous_dependence(d, shared); }},
  };

  int failures = 0;
  for (size_t i = 0; i < checks.size(); ++i) {
    std::string detail;
    bool ok = false;
    try {
      ok = checks[i].fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::printf("[%2zu/10] %s %s (%s)\n", i + 1, ok ? "PASS" : "FAIL", checks[i].name,
                detail.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/10 passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
