#pragma once

#include <cmath>
#include <string>

#include <tac/stepper.hpp>

namespace tac {

// Heated body over a cool adhesive layer, pressed down by a gravity-like
// body force. Constant latent factor keeps the cohesion work term dominated
// by the damage dissipation, so the zero-source variant of this preset
// dissipates its Lyapunov functional step by step.
inline Scenario reference_preset(int nx = 32, int ny = 30) {
  Scenario sc;
  sc.name = "reference";
  sc.mesh = mark_rect_standard(build_structured_rect(nx, ny, {0.0, 0.0, 1.0, 1.0}),
                               {0.0, 0.0, 1.0, 1.0});
  sc.mat.tensors = ElasticityTensors::isotropic(2.0, 1.0, 0.5, 0.25);
  sc.mat.thermal_law = ThermalLaw::logarithmic();
  sc.mat.k0 = 0.2;
  sc.mat.k1 = 0.8;
  sc.mat.lam0 = 0.5;
  sc.mat.lam1 = 0.0;
  sc.mat.lam2 = 0.0;
  sc.mat.theta_eq = 1.0;
  sc.mat.kappa_pen = 1e6;
  sc.solver.eps = 1e-3;
  sc.solver.mu = 1e-2;
  sc.solver.dt = 0.005;
  sc.solver.t_end = 0.5;
  sc.solver.fp_tol = 1e-10;
  sc.w0 = [](double x, double y) { return 0.5 + 0.3 * std::cos(M_PI * x) * std::cos(M_PI * y); };
  sc.z0 = [](double x, double) { return -0.5 + 0.1 * std::cos(M_PI * x); };
  sc.chi0 = [](double, double) { return 0.5; };
  sc.u0 = [](double, double) { return Eigen::Vector2d::Zero().eval(); };
  sc.f = [](double, double, double) { return Eigen::Vector2d(0.0, -3.0); };
  return sc;
}

// Insulated interface and constant latent factor: the bulk block (theta, u,
// chi) and the surface temperature evolve independently of each other.
inline Scenario decoupled_preset(int nx = 16, int ny = 14) {
  Scenario sc;
  sc.name = "decoupled";
  sc.mesh = mark_rect_standard(build_structured_rect(nx, ny, {0.0, 0.0, 1.0, 1.0}),
                               {0.0, 0.0, 1.0, 1.0});
  sc.mat.tensors = ElasticityTensors::isotropic(2.0, 1.0, 0.5, 0.25);
  sc.mat.thermal_law = ThermalLaw::logarithmic();
  sc.mat.k0 = 0.0;
  sc.mat.k1 = 0.0;
  sc.mat.lam0 = 0.4;
  sc.mat.lam1 = 0.0;
  sc.mat.lam2 = 0.0;
  sc.mat.theta_eq = 1.0;
  sc.mat.kappa_pen = 1e6;
  sc.solver.eps = 1e-3;
  sc.solver.mu = 1e-2;
  sc.solver.dt = 0.01;
  sc.solver.t_end = 0.1;
  sc.solver.fp_tol = 1e-12;
  sc.w0 = [](double x, double y) { return 0.4 + 0.2 * std::cos(M_PI * x) * std::cos(M_PI * y); };
  sc.z0 = [](double x, double) { return -0.3 + 0.1 * std::cos(M_PI * x); };
  sc.chi0 = [](double x, double) { return 0.5 + 0.2 * std::cos(M_PI * x); };
  sc.u0 = [](double, double) { return Eigen::Vector2d::Zero().eval(); };
  sc.f = [](double, double, double) { return Eigen::Vector2d(0.0, -0.5); };
  return sc;
}

// Fully bonded adhesive pulled away from the support, hardest at the right
// edge: debonding is monotone from chi = 1 (the double well cannot heal past
// a bound) and the latent coupling feeds the surface temperature.
inline Scenario peel_preset(int nx = 32, int ny = 8) {
  Scenario sc;
  sc.name = "peel";
  sc.mesh = mark_rect_standard(build_structured_rect(nx, ny, {0.0, 0.0, 2.0, 0.5}),
                               {0.0, 0.0, 2.0, 0.5});
  sc.mat.tensors = ElasticityTensors::isotropic(2.0, 1.0, 0.1, 0.05);
  sc.mat.thermal_law = ThermalLaw::logarithmic();
  sc.mat.k0 = 0.3;
  sc.mat.k1 = 0.7;
  sc.mat.lam0 = 0.2;
  sc.mat.lam1 = 0.4;
  sc.mat.lam2 = 0.1;
  sc.mat.theta_eq = 1.0;
  sc.mat.kappa_pen = 1e6;
  sc.solver.eps = 1e-3;
  sc.solver.mu = 1e-2;
  sc.solver.dt = 0.005;
  sc.solver.t_end = 0.25;
  sc.w0 = [](double, double) { return 0.2; };
  sc.z0 = [](double, double) { return 0.1; };
  sc.chi0 = [](double, double) { return 1.0; };
  sc.u0 = [](double, double) { return Eigen::Vector2d::Zero().eval(); };
  sc.g_c = [](double x, double, double) { return Eigen::Vector2d(0.0, 1.0 + 1.5 * x); };
  return sc;
}

// Linear-law benchmark with a prescribed exact solution. The sources below
// are the hand-derived residuals of the exact fields in the mu-regularized
// system; the initial temperatures are spatially constant so the elliptic
// mollification of the initial data is exact. The exact damage stays inside
// (0,1) and the exact displacement stays off the support, so neither
// constraint activates.
struct ManufacturedCase {
  Scenario scenario;
  ScalarField theta_ex;    // (x, y, t)
  ScalarField theta_s_ex;  // (x, _, t) on the contact line
  ScalarField chi_ex;      // (x, _, t) on the contact line
  VectorField u_ex;        // (x, y, t)
};

inline ManufacturedCase manufactured_case(int nx = 16, int ny = 16, double dt = 0.01,
                                          double t_end = 0.1, double eps = 0.0,
                                          double mu = 1e-2) {
  const double le = 2.0, me = 1.0, lv = 0.5, mv = 0.25;
  const double k0 = 0.5;
  const double lam0 = 0.1, lam1 = 0.2, lam2 = 0.1;
  const double theta_eq = 1.0;
  const double c_mu = (1.0 + mu) / (mu * mu + mu + 1.0);
  const double pi = M_PI;

  // Time profiles. Temperatures start constant; displacement and damage
  // start with a nonzero admissible profile.
  const auto s_t = [](double t) { return 0.4 * std::sin(t); };
  const auto s_dot = [](double t) { return 0.4 * std::cos(t); };
  const auto q_t = [](double t) { return 0.2 * std::sin(t); };
  const auto q_dot = [](double t) { return 0.2 * std::cos(t); };
  const auto r_t = [](double t) { return 0.1 + 0.1 * std::sin(t); };
  const auto r_dot = [](double t) { return 0.1 * std::cos(t); };
  const auto a_t = [](double t) { return 0.15 + 0.1 * std::sin(t); };
  const auto a_dot = [](double t) { return 0.1 * std::cos(t); };

  // Spatial profiles.
  const auto m_xy = [pi](double x, double y) { return std::cos(pi * x) * std::cos(pi * y); };
  const auto p_x = [pi](double x) { return std::cos(pi * x); };
  const auto c_x = [pi](double x) { return 0.5 + 0.3 * std::cos(2.0 * pi * x); };
  const auto cp_x = [pi](double x) { return -0.6 * pi * std::sin(2.0 * pi * x); };
  const auto cpp_x = [pi](double x) { return -1.2 * pi * pi * std::cos(2.0 * pi * x); };

  ManufacturedCase mc;
  mc.theta_ex = [=](double x, double y, double t) { return 1.0 + s_t(t) * m_xy(x, y); };
  mc.theta_s_ex = [=](double x, double, double t) { return 0.7 + q_t(t) * p_x(x); };
  mc.chi_ex = [=](double x, double, double t) { return 0.5 + r_t(t) * p_x(x); };
  mc.u_ex = [=](double x, double y, double t) {
    return Eigen::Vector2d(a_t(t) * std::sin(pi * x) * (1.0 - y) * (1.0 - y),
                           a_t(t) * c_x(x) * (1.0 - y));
  };

  // Stress of the exact fields: Sigma = K_v eps(u_t) + K eps(u). Both are
  // multiples of the same strain shape, with time-dependent moduli.
  const auto lam_t = [=](double t) { return le * a_t(t) + lv * a_dot(t); };
  const auto mu_t = [=](double t) { return me * a_t(t) + mv * a_dot(t); };
  struct Strain {
    double e11, e22, e12, div;
  };
  const auto strain_shape = [=](double x, double y) {
    Strain e;
    e.e11 = pi * std::cos(pi * x) * (1.0 - y) * (1.0 - y);
    e.e22 = -c_x(x);
    e.e12 = 0.5 * (1.0 - y) * (cp_x(x) - 2.0 * std::sin(pi * x));
    e.div = e.e11 + e.e22;
    return e;
  };
  const auto sigma = [=](double x, double y, double t) {
    const Strain e = strain_shape(x, y);
    Eigen::Matrix2d S;
    S(0, 0) = lam_t(t) * e.div + 2.0 * mu_t(t) * e.e11;
    S(1, 1) = lam_t(t) * e.div + 2.0 * mu_t(t) * e.e22;
    S(0, 1) = S(1, 0) = 2.0 * mu_t(t) * e.e12;
    return S;
  };

  Scenario sc;
  sc.name = "manufactured";
  sc.mesh = mark_rect_standard(build_structured_rect(nx, ny, {0.0, 0.0, 1.0, 1.0}),
                               {0.0, 0.0, 1.0, 1.0});
  sc.mat.tensors = ElasticityTensors::isotropic(le, me, lv, mv);
  sc.mat.thermal_law = ThermalLaw::linear();
  sc.mat.k0 = k0;
  sc.mat.k1 = 0.0;
  sc.mat.lam0 = lam0;
  sc.mat.lam1 = lam1;
  sc.mat.lam2 = lam2;
  sc.mat.theta_eq = theta_eq;
  sc.mat.kappa_pen = 1e6;
  sc.solver.eps = eps;
  sc.solver.mu = mu;
  sc.solver.dt = dt;
  sc.solver.t_end = t_end;
  sc.solver.fp_tol = 1e-11;

  sc.w0 = [=](double, double) { return c_mu * 1.0; };
  sc.z0 = [=](double, double) { return c_mu * 0.7; };
  sc.chi0 = [=](double x, double) { return mc.chi_ex(x, 0.0, 0.0); };
  sc.u0 = [=](double x, double y) { return mc.u_ex(x, y, 0.0).eval(); };

  // Bulk heat source: eps d/dt(theta - lap theta) + c_mu d/dt theta
  // - lap theta - div(u_t).
  sc.h = [=](double x, double y, double t) {
    const double mode = m_xy(x, y);
    const double div_shape = pi * std::cos(pi * x) * (1.0 - y) * (1.0 - y) - c_x(x);
    return s_dot(t) * (eps * (1.0 + 2.0 * pi * pi) + c_mu) * mode +
           2.0 * pi * pi * s_t(t) * mode - a_dot(t) * div_shape;
  };

  // Surface heat source: eps d/dt(theta_s - theta_s'') + c_mu d/dt theta_s
  // - theta_s'' + k0 (theta_s - theta|_c) - d/dt lambda(chi).
  sc.h_s = [=](double x, double, double t) {
    const double p = p_x(x);
    const double chi = mc.chi_ex(x, 0.0, t);
    return (eps * q_dot(t) * (1.0 + pi * pi) + c_mu * q_dot(t) + pi * pi * q_t(t)) * p +
           k0 * (-0.3 + (q_t(t) - s_t(t)) * p) -
           (lam1 + 2.0 * lam2 * chi) * r_dot(t) * p;
  };

  // Flux correction on the contact line: the exact conduction flux vanishes
  // there, so b_c carries the exchange term of the exact fields.
  sc.b_c = [=](double x, double, double t) {
    return k0 * (0.3 + (s_t(t) - q_t(t)) * p_x(x));
  };

  // Body force: -div Sigma - grad theta (the temperature enters the stress
  // as +theta I).
  sc.f = [=](double x, double y, double t) {
    const double lm = lam_t(t) + mu_t(t);
    const Eigen::Vector2d grad_div(
        -pi * pi * std::sin(pi * x) * (1.0 - y) * (1.0 - y) - cp_x(x),
        -2.0 * pi * std::cos(pi * x) * (1.0 - y));
    const Eigen::Vector2d lap_shape(
        std::sin(pi * x) * (2.0 - pi * pi * (1.0 - y) * (1.0 - y)),
        cpp_x(x) * (1.0 - y));
    const Eigen::Vector2d grad_theta(-pi * s_t(t) * std::sin(pi * x) * std::cos(pi * y),
                                     -pi * s_t(t) * std::cos(pi * x) * std::sin(pi * y));
    return (-lm * grad_div - mu_t(t) * lap_shape - grad_theta).eval();
  };

  // Traction on the side walls: (Sigma + theta I) n.
  sc.g = [=](double x, double y, double t) {
    const Eigen::Vector2d n = x < 0.5 ? Eigen::Vector2d(-1.0, 0.0) : Eigen::Vector2d(1.0, 0.0);
    const Eigen::Matrix2d S = sigma(x, y, t);
    const double th = mc.theta_ex(x, y, t);
    return ((S + th * Eigen::Matrix2d::Identity()) * n).eval();
  };

  // Traction on the contact line: (Sigma + theta I) n + chi u, n = (0, -1);
  // the penalty term is inactive for the exact displacement.
  sc.g_c = [=](double x, double, double t) {
    const Eigen::Matrix2d S = sigma(x, 0.0, t);
    const double th = mc.theta_ex(x, 0.0, t);
    const Eigen::Vector2d trac(-S(0, 1), -(S(1, 1) + th));
    return (trac + mc.chi_ex(x, 0.0, t) * mc.u_ex(x, 0.0, t)).eval();
  };

  // Damage source: chi_t - chi'' + sigma'(chi) + lambda'(chi)(theta_s -
  // theta_eq) + |u|^2 / 2.
  const CohesionSpec sig = sc.mat.sigma_spec;
  sc.g_chi = [=](double x, double, double t) {
    const double p = p_x(x);
    const double chi = mc.chi_ex(x, 0.0, t);
    const double sx = std::sin(pi * x);
    const double u2 = a_t(t) * a_t(t) * (sx * sx + c_x(x) * c_x(x));
    return r_dot(t) * p + pi * pi * r_t(t) * p + sig.eval(chi) +
           (lam1 + 2.0 * lam2 * chi) * (mc.theta_s_ex(x, 0.0, t) - theta_eq) + 0.5 * u2;
  };

  mc.scenario = std::move(sc);
  return mc;
}

inline Scenario preset_by_name(const std::string& name) {
  if (name == "reference") return reference_preset();
  if (name == "decoupled") return decoupled_preset();
  if (name == "peel") return peel_preset();
  if (name == "manufactured") return manufactured_case().scenario;
  throw ValidationError("unknown preset '" + name +
                        "' (expected reference, decoupled, peel, or manufactured)");
}

} // namespace tac
