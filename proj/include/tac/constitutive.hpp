#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "tac/assembly.hpp"
#include "tac/errors.hpp"
#include "tac/mesh.hpp"
#include "tac/monotone.hpp"

namespace tac {

// Cubic slope s0 + s1 x + s2 x^2 + s3 x^3 evaluated with the argument clamped
// to [chi_lo, chi_hi]. The clamp makes the map globally Lipschitz while
// leaving it untouched on the physical range [0, 1].
struct CohesionSpec {
  double s0 = 0.0;
  double s1 = 1.0;
  double s2 = -3.0;
  double s3 = 2.0;
  double chi_lo = -1.0;
  double chi_hi = 2.0;

  // Derivative of the double well c * x^2 (1-x)^2.
  static CohesionSpec double_well(double c) {
    return CohesionSpec{0.0, c, -3.0 * c, 2.0 * c, -1.0, 2.0};
  }

  double eval(double x) const {
    const double t = std::clamp(x, chi_lo, chi_hi);
    return s0 + t * (s1 + t * (s2 + t * s3));
  }

  // Antiderivative with sigma(0) = 0; linear continuation outside the window
  // matches the clamped slope.
  double antiderivative(double x) const {
    const auto base = [&](double t) {
      return t * (s0 + t * (s1 / 2.0 + t * (s2 / 3.0 + t * s3 / 4.0)));
    };
    if (x < chi_lo) return base(chi_lo) + eval(chi_lo) * (x - chi_lo);
    if (x > chi_hi) return base(chi_hi) + eval(chi_hi) * (x - chi_hi);
    return base(x);
  }
};

struct MaterialParams {
  ElasticityTensors tensors = ElasticityTensors::isotropic(1.0, 1.0, 1.0, 1.0);
  double k0 = 0.0;   // residual contact conductivity
  double k1 = 1.0;   // adhesion-dependent contact conductivity
  double lam0 = 0.0; // latent heat lambda(chi) = lam0 + lam1 chi + lam2 chi^2
  double lam1 = 1.0;
  double lam2 = 0.0;
  CohesionSpec sigma_spec{};
  double theta_eq = 1.0;
  double kappa_pen = 1e6;
  ThermalLaw thermal_law = ThermalLaw::logarithmic();

  void validate() const {
    if (!(k0 >= 0.0) || !(k1 >= 0.0))
      throw ValidationError("contact conductivity coefficients must be nonnegative");
    if (!(theta_eq > 0.0)) throw ValidationError("theta_eq must be positive");
    if (!(kappa_pen > 0.0)) throw ValidationError("kappa_pen must be positive");
    if (!(sigma_spec.chi_lo <= 0.0) || !(sigma_spec.chi_hi >= 1.0))
      throw ValidationError("cohesion clamp window must contain [0, 1]");
  }
};

// Contact heat conductivity k(chi) = k0 + k1 clamp(chi, 0, 1); nonnegative and
// nondecreasing, vanishing when k0 = 0 and the bond is fully broken.
inline double k_of_chi(const MaterialParams& p, double chi) {
  return p.k0 + p.k1 * std::clamp(chi, 0.0, 1.0);
}

inline double lambda_of(const MaterialParams& p, double chi) {
  return p.lam0 + chi * (p.lam1 + chi * p.lam2);
}

inline double lambda_prime(const MaterialParams& p, double chi) {
  return p.lam1 + 2.0 * p.lam2 * chi;
}

// Effective cohesion slope sigma'(chi) - lambda'(chi) * theta_eq: the
// equilibrium-temperature part of the latent coupling is folded into the
// surface potential, so the damage equation only sees theta_s relative to
// theta_eq.
inline double sigma_prime_eff(const MaterialParams& p, double chi) {
  return p.sigma_spec.eval(chi) - lambda_prime(p, chi) * p.theta_eq;
}

struct BoxProx {
  Eigen::VectorXd chi; // projected values, in [0, 1] nodally
  Eigen::VectorXd xi;  // multiplier: <= 0 where chi = 0, >= 0 where chi = 1, 0 inside
};

// Exact proximal map of the box indicator for the lumped nodal energy
// sum_i diag_i/2 (chi_i - chi_hat_i)^2: componentwise projection onto [0, 1].
// xi_i = diag_i (chi_hat_i - chi_i) is the complementarity residual, an
// element of the indicator's subdifferential at the projected point.
inline BoxProx prox_box(const Eigen::VectorXd& chi_hat, const Eigen::VectorXd& diag) {
  if (chi_hat.size() != diag.size()) throw ValidationError("prox_box: size mismatch");
  BoxProx out;
  out.chi.resize(chi_hat.size());
  out.xi.resize(chi_hat.size());
  for (Eigen::Index i = 0; i < chi_hat.size(); ++i) {
    if (!(diag[i] > 0.0)) throw ValidationError("prox_box: weights must be positive");
    const double c = std::clamp(chi_hat[i], 0.0, 1.0);
    out.chi[i] = c;
    out.xi[i] = diag[i] * (chi_hat[i] - c);
  }
  return out;
}

struct ContactReaction {
  Eigen::VectorXd eta_n;     // kappa_pen * [u.n]_+ per contact node
  Eigen::MatrixX2d reaction; // full reaction integrand -chi u - eta_n n
};

// Penalty realization of the impenetrability reaction on the contact line.
// u is the full interleaved displacement vector; chi_c lives on contact nodes.
inline ContactReaction contact_reaction(const Mesh& mesh, const Eigen::VectorXd& u,
                                        const Eigen::VectorXd& chi_c,
                                        const MaterialParams& p) {
  const int nc = mesh.n_contact();
  if (u.size() != 2 * mesh.n_vertices()) throw ValidationError("contact_reaction: bad u size");
  if (chi_c.size() != nc) throw ValidationError("contact_reaction: bad chi size");
  ContactReaction out;
  out.eta_n.resize(nc);
  out.reaction.resize(nc, 2);
  for (int a = 0; a < nc; ++a) {
    const int v = mesh.contact_nodes[a];
    const Eigen::Vector2d ua(u[2 * v], u[2 * v + 1]);
    const Eigen::Vector2d n = mesh.contact_normals[a];
    out.eta_n[a] = p.kappa_pen * std::max(0.0, ua.dot(n));
    out.reaction.row(a) = (-chi_c[a] * ua - out.eta_n[a] * n).transpose();
  }
  return out;
}

} // namespace tac
