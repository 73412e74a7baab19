#pragma once

// Scalar calculus of the entropy nonlinearity w = l(theta) and its
// regularizations. l is the derivative of a convex potential j; gamma = l^-1
// is the derivative of the conjugate j*, extended maximal-monotonically to
// all of R. The composite regularization L_mu = (mu*Id + gamma_mu)^-1
// replaces l in the regularized system and is evaluated nodally by the
// temperature solvers, so everything here is a pure scalar function.

#include <cmath>
#include <limits>
#include <string>

#include "tac/errors.hpp"

namespace tac {

enum class LawKind { Logarithmic, PowerLaw, Linear };

// One of three entropy law families:
//   Logarithmic: j = x log x - x on [0,inf),  l(x) = log x,   gamma(y) = e^y
//   PowerLaw p:  j = x^(p+1)/(p(p+1)) on [0,inf), l(x) = x^p/p,
//                gamma(y) = (p y)^(1/p) for y > 0, 0 for y <= 0
//   Linear:      j = x^2/2 on R,              l(x) = x,       gamma(y) = y
// Coercivity constants satisfy j*(y) >= c1|x| - c2 whenever y in l(x).
struct ThermalLaw {
  LawKind kind = LawKind::Logarithmic;
  double p_exp = 1.0;  // PowerLaw exponent, > 0; ignored by the other kinds

  static ThermalLaw logarithmic() { return {LawKind::Logarithmic, 1.0}; }
  static ThermalLaw power_law(double p) {
    if (!(p > 0.0)) throw ValidationError("ThermalLaw: power-law exponent must be > 0");
    return {LawKind::PowerLaw, p};
  }
  static ThermalLaw linear() { return {LawKind::Linear, 1.0}; }

  double dom_lower() const {
    return kind == LawKind::Linear ? -std::numeric_limits<double>::infinity() : 0.0;
  }
  // Laws whose domain is bounded below by 0 (positivity is meaningful).
  bool positive_domain() const { return kind != LawKind::Linear; }

  bool in_domain(double x) const {
    switch (kind) {
      case LawKind::Logarithmic: return x > 0.0;
      case LawKind::PowerLaw: return x >= 0.0;
      case LawKind::Linear: return true;
    }
    return false;
  }

  double coercivity_c1() const { return 1.0; }
  double coercivity_c2() const {
    switch (kind) {
      case LawKind::Logarithmic: return 0.0;
      case LawKind::PowerLaw: return p_exp / (p_exp + 1.0);
      case LawKind::Linear: return 0.5;
    }
    return 0.0;
  }

  // Convex potential j. Outside the domain the potential is +inf; callers
  // that may leave the domain (diagnostics) must branch on in_domain first.
  double j(double x) const {
    switch (kind) {
      case LawKind::Logarithmic:
        if (x < 0.0) throw DomainViolation("j: x < 0 for logarithmic law");
        return x > 0.0 ? x * std::log(x) - x : 0.0;
      case LawKind::PowerLaw:
        if (x < 0.0) throw DomainViolation("j: x < 0 for power law");
        return std::pow(x, p_exp + 1.0) / (p_exp * (p_exp + 1.0));
      case LawKind::Linear:
        return 0.5 * x * x;
    }
    return 0.0;
  }

  // Legendre conjugate j*; finite on all of R for these families.
  double jstar(double y) const {
    switch (kind) {
      case LawKind::Logarithmic:
        return std::exp(y);
      case LawKind::PowerLaw:
        return y > 0.0 ? p_exp / (p_exp + 1.0) * y * std::pow(p_exp * y, 1.0 / p_exp) : 0.0;
      case LawKind::Linear:
        return 0.5 * y * y;
    }
    return 0.0;
  }
};

struct RegParams {
  double mu = 1e-2;           // Yosida parameter, > 0
  double newton_tol = 1e-12;  // residual tolerance of scalar root solves
  int newton_max_iter = 100;

  void validate() const {
    if (!(mu > 0.0)) throw ValidationError("RegParams: mu must be > 0");
    if (!(newton_tol > 0.0)) throw ValidationError("RegParams: newton_tol must be > 0");
    if (newton_max_iter < 1) throw ValidationError("RegParams: newton_max_iter must be >= 1");
  }
};

// w = l(theta) on the domain interior.
inline double ell_apply(const ThermalLaw& law, double x) {
  switch (law.kind) {
    case LawKind::Logarithmic:
      if (!(x > 0.0)) throw DomainViolation("ell_apply: x <= 0 for logarithmic law");
      return std::log(x);
    case LawKind::PowerLaw:
      if (x < 0.0) throw DomainViolation("ell_apply: x < 0 for power law");
      return std::pow(x, law.p_exp) / law.p_exp;
    case LawKind::Linear:
      return x;
  }
  return 0.0;
}

// gamma = l^-1 = d/dy j*, single-valued on all of R.
inline double gamma_apply(const ThermalLaw& law, double y) {
  switch (law.kind) {
    case LawKind::Logarithmic:
      return std::exp(y);
    case LawKind::PowerLaw:
      return y > 0.0 ? std::pow(law.p_exp * y, 1.0 / law.p_exp) : 0.0;
    case LawKind::Linear:
      return y;
  }
  return 0.0;
}

// One-sided derivative of gamma; may be +inf at the power-law kink (p > 1).
inline double gamma_derivative(const ThermalLaw& law, double y) {
  switch (law.kind) {
    case LawKind::Logarithmic:
      return std::exp(y);
    case LawKind::PowerLaw:
      return y > 0.0 ? std::pow(law.p_exp * y, 1.0 / law.p_exp - 1.0) : 0.0;
    case LawKind::Linear:
      return 1.0;
  }
  return 0.0;
}

namespace detail {

// Root of a nondecreasing scalar function: safeguarded Newton inside a
// bracket that is widened geometrically from [lo, hi] until the sign
// changes. Converges on |f(x)| <= tol; falls back to bisection whenever the
// Newton step is unusable or leaves the bracket.
template <class F, class DF>
double solve_increasing(F&& f, DF&& df, double lo, double hi, double tol, int max_iter,
                        const char* what) {
  double flo = f(lo);
  double fhi = f(hi);
  double width = hi - lo;
  for (int i = 0; flo > 0.0; ++i) {
    if (i >= 200 || !std::isfinite(lo)) throw NoConvergence(std::string(what) + ": no lower bracket");
    lo -= width;
    width *= 2.0;
    flo = f(lo);
  }
  for (int i = 0; fhi < 0.0; ++i) {
    if (i >= 200 || !std::isfinite(hi)) throw NoConvergence(std::string(what) + ": no upper bracket");
    hi += width;
    width *= 2.0;
    fhi = f(hi);
  }
  if (std::isnan(flo) || std::isnan(fhi)) throw NoConvergence(std::string(what) + ": NaN bracket");
  if (std::abs(flo) <= tol) return lo;
  if (std::abs(fhi) <= tol) return hi;

  double x = 0.5 * (lo + hi);
  double last_step = hi - lo;
  for (int it = 0; it < max_iter; ++it) {
    const double fx = f(x);
    if (std::abs(fx) <= tol) return x;
    if (fx > 0.0) hi = x; else lo = x;
    // Bracket collapsed to machine resolution: the residual floor is set by
    // evaluation roundoff, not by the iteration.
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) return x;
    const double d = df(x);
    double next = x - fx / d;
    // Take the Newton step only when it stays inside the bracket and shrinks
    // at least as fast as bisection; on steep convex tails (exp) unguarded
    // Newton crawls by O(1) per iteration instead of contracting.
    if (!(d > 0.0) || !std::isfinite(next) || next <= lo || next >= hi ||
        2.0 * std::abs(fx) > last_step * d)
      next = 0.5 * (lo + hi);
    last_step = std::abs(next - x);
    x = next;
  }
  throw NoConvergence(std::string(what) + ": iteration budget exhausted");
}

}  // namespace detail

// Resolvent rho_mu(w): the unique root of rho + mu*gamma(rho) = w.
inline double resolvent(const ThermalLaw& law, const RegParams& reg, double w) {
  reg.validate();
  if (law.kind == LawKind::Linear) return w / (1.0 + reg.mu);
  const auto f = [&](double r) { return r + reg.mu * gamma_apply(law, r) - w; };
  const auto df = [&](double r) { return 1.0 + reg.mu * gamma_derivative(law, r); };
  return detail::solve_increasing(f, df, std::min(w, 0.0) - 1.0, std::max(w, 0.0) + 1.0,
                                  reg.newton_tol, reg.newton_max_iter, "resolvent");
}

// Yosida approximation gamma_mu(w) = (w - rho_mu(w))/mu = gamma(rho_mu(w)).
inline double yosida_apply(const ThermalLaw& law, const RegParams& reg, double w) {
  return (w - resolvent(law, reg, w)) / reg.mu;
}

// Moreau envelope of j*, via the identity j*_mu(w) = (mu/2) gamma_mu(w)^2 + j*(rho_mu(w)).
inline double jstar_moreau(const ThermalLaw& law, const RegParams& reg, double w) {
  const double rho = resolvent(law, reg, w);
  const double gm = (w - rho) / reg.mu;
  return 0.5 * reg.mu * gm * gm + law.jstar(rho);
}

// L_mu(u) = (mu*Id + gamma_mu)^-1 (u). Eliminating the inner resolvent turns
// mu*y + gamma_mu(y) = u into the single root problem
//   gamma(y (1+mu^2) - mu u) + mu y - u = 0,
// whose argument r = y(1+mu^2) - mu u is exactly rho_mu(y) at the root.
inline double ell_reg_apply(const ThermalLaw& law, const RegParams& reg, double u) {
  reg.validate();
  const double mu = reg.mu;
  if (law.kind == LawKind::Linear) return u * (1.0 + mu) / (mu * mu + mu + 1.0);
  const double s = 1.0 + mu * mu;
  const auto f = [&](double y) { return gamma_apply(law, y * s - mu * u) + mu * y - u; };
  const auto df = [&](double y) {
    const double g = gamma_derivative(law, y * s - mu * u);
    return std::isfinite(g) ? s * g + mu : g;
  };
  return detail::solve_increasing(f, df, std::min(u, 0.0) - 1.0, std::max(u, 0.0) + 1.0,
                                  reg.newton_tol, reg.newton_max_iter, "ell_reg_apply");
}

// d L_mu / du = 1/(mu + gamma_mu'(y)) at y = L_mu(u), with
// gamma_mu'(y) = gamma'(r)/(1 + mu gamma'(r)) at r = rho_mu(y). Value in (0, 1/mu].
inline double ell_reg_derivative(const ThermalLaw& law, const RegParams& reg, double u) {
  const double mu = reg.mu;
  if (law.kind == LawKind::Linear) return (1.0 + mu) / (mu * mu + mu + 1.0);
  const double y = ell_reg_apply(law, reg, u);
  const double r = y * (1.0 + mu * mu) - mu * u;
  const double g = gamma_derivative(law, r);
  const double gm = std::isfinite(g) ? g / (1.0 + mu * g) : 1.0 / mu;
  return 1.0 / (mu + gm);
}

// Right inverse of L_mu: theta = mu*w + gamma_mu(w), so ell_reg_apply(theta) == w.
inline double ell_reg_inverse(const ThermalLaw& law, const RegParams& reg, double w) {
  return reg.mu * w + yosida_apply(law, reg, w);
}

// Coercivity transfer: with w = L_mu(u),
//   mu w^2 + j*_mu(w) >= c1|u| - c2bar,   c2bar = c2 + (mu/4) c1^2
// (the mu-quadratic term absorbs c1*mu*|w| by completing the square).
// Returns the slack of that inequality; contract: slack >= 0 for all u.
inline double coercivity_bound(const ThermalLaw& law, const RegParams& reg, double u) {
  const double w = ell_reg_apply(law, reg, u);
  const double c1 = law.coercivity_c1();
  const double c2bar = law.coercivity_c2() + 0.25 * reg.mu * c1 * c1;
  return reg.mu * w * w + jstar_moreau(law, reg, w) - c1 * std::abs(u) + c2bar;
}

}  // namespace tac
