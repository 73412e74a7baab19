#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "tac/monotone.hpp"

using Catch::Approx;
using namespace tac;

namespace {
const ThermalLaw kLog = ThermalLaw::logarithmic();
const ThermalLaw kLin = ThermalLaw::linear();

std::vector<ThermalLaw> all_laws() {
  return {kLog, ThermalLaw::power_law(0.5), ThermalLaw::power_law(1.0),
          ThermalLaw::power_law(2.0), kLin};
}

RegParams reg(double mu) { return RegParams{mu, 1e-12, 100}; }
}  // namespace

TEST_CASE("ell_apply evaluates the law on its domain and rejects the rest") {
  CHECK(ell_apply(kLog, 1.0) == 0.0);
  CHECK(ell_apply(kLin, 3.5) == 3.5);
  CHECK(ell_apply(ThermalLaw::power_law(1.0), 2.0) == Approx(2.0).margin(1e-15));
  CHECK(ell_apply(ThermalLaw::power_law(2.0), 3.0) == Approx(4.5).margin(1e-15));

  CHECK_THROWS_AS(ell_apply(kLog, 0.0), DomainViolation);
  CHECK_THROWS_AS(ell_apply(kLog, -1.0), DomainViolation);
  CHECK_THROWS_AS(ell_apply(ThermalLaw::power_law(2.0), -0.1), DomainViolation);
  CHECK_NOTHROW(ell_apply(kLin, -7.0));
}

TEST_CASE("gamma_apply is the maximal monotone inverse") {
  CHECK(gamma_apply(kLog, 0.0) == 1.0);
  CHECK(gamma_apply(ThermalLaw::power_law(2.0), -1.0) == 0.0);
  CHECK(gamma_apply(kLin, -2.0) == -2.0);
  CHECK(gamma_apply(ThermalLaw::power_law(2.0), 2.0) == Approx(2.0).margin(1e-15));

  // gamma inverts ell on the domain interior.
  for (const auto& law : all_laws()) {
    for (double x : {0.3, 1.0, 2.7}) {
      CHECK(gamma_apply(law, ell_apply(law, x)) == Approx(x).epsilon(1e-13));
    }
  }
}

TEST_CASE("resolvent solves rho + mu*gamma(rho) = w") {
  SECTION("closed forms and frozen oracle roots") {
    CHECK(resolvent(kLog, reg(1.0), 1.0) == Approx(0.0).margin(1e-12));
    CHECK(resolvent(kLin, reg(1.0), 2.0) == Approx(1.0).margin(1e-15));
    // Independent oracle: bisection on r + e^r - 2 over [0, 1].
    const double rho_oracle = oracle::bisect([](double r) { return r + std::exp(r) - 2.0; }, 0.0, 1.0);
    CHECK(rho_oracle == Approx(oracle::kRhoLogMu1W2).margin(1e-14));
    CHECK(resolvent(kLog, reg(1.0), 2.0) == Approx(rho_oracle).margin(1e-12));
  }

  SECTION("residual identity over laws, mu, w") {
    for (const auto& law : all_laws()) {
      for (double mu : {1.0, 0.1, 1e-2, 1e-3, 1e-4}) {
        for (double w = -20.0; w <= 20.0; w += 0.5) {
          const double rho = resolvent(law, reg(mu), w);
          CHECK(std::abs(rho + mu * gamma_apply(law, rho) - w) <= 1e-10);
        }
      }
    }
  }
}

TEST_CASE("yosida_apply is the Yosida approximation of gamma") {
  CHECK(yosida_apply(kLin, reg(1.0), 2.0) == Approx(1.0).margin(1e-15));
  CHECK(yosida_apply(kLog, reg(1.0), 1.0) == Approx(1.0).margin(1e-12));
  // rho + e^rho = 0 => rho = -kOmega and gamma_mu(0) = -rho = kOmega.
  const double rho_oracle = oracle::bisect([](double r) { return r + std::exp(r); }, -1.0, 0.0);
  CHECK(-rho_oracle == Approx(oracle::kOmega).margin(1e-14));
  CHECK(yosida_apply(kLog, reg(1.0), 0.0) == Approx(oracle::kOmega).margin(1e-12));

  // gamma_mu(w) = gamma(rho_mu(w)) within tolerance.
  for (const auto& law : all_laws()) {
    for (double mu : {1.0, 0.1, 1e-3}) {
      for (double w : {-3.0, -0.4, 0.0, 0.9, 7.5}) {
        const double rho = resolvent(law, reg(mu), w);
        CHECK(yosida_apply(law, reg(mu), w) ==
              Approx(gamma_apply(law, rho)).margin(1e-12 / mu).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("ell_reg_apply solves mu*y + gamma_mu(y) = u") {
  SECTION("linear closed form") {
    CHECK(ell_reg_apply(kLin, reg(1.0), 1.0) == Approx(2.0 / 3.0).margin(1e-15));
    for (double mu : {1.0, 0.37, 1e-2}) {
      for (double u : {-4.0, 0.0, 2.5}) {
        CHECK(ell_reg_apply(kLin, reg(mu), u) ==
              Approx(u * (1.0 + mu) / (mu * mu + mu + 1.0)).margin(1e-12));
      }
    }
  }

  SECTION("logarithmic law against the independent oracle") {
    // mu = 1, u = 1: the reduced equation is e^{2y-1} = 1 - y.
    const double y_oracle =
        oracle::bisect([](double y) { return std::exp(2.0 * y - 1.0) - (1.0 - y); }, 0.0, 1.0);
    CHECK(y_oracle == Approx(oracle::kEllRegLogMu1U1).margin(1e-14));
    CHECK(ell_reg_apply(kLog, reg(1.0), 1.0) == Approx(y_oracle).margin(1e-12));
  }

  SECTION("right-inverse round trip") {
    for (const auto& law : all_laws()) {
      for (double mu : {1.0, 0.2, 1e-2}) {
        for (double ystar : {-2.0, -0.3, 0.0, 0.7, 4.0}) {
          const double u = mu * ystar + yosida_apply(law, reg(mu), ystar);
          CHECK(ell_reg_apply(law, reg(mu), u) == Approx(ystar).margin(1e-9).epsilon(1e-9));
        }
      }
    }
  }

  SECTION("defining equation residual") {
    for (const auto& law : all_laws()) {
      for (double mu : {1.0, 1e-2, 1e-4}) {
        for (double u : {-20.0, -1.0, 0.0, 0.3, 20.0}) {
          const double y = ell_reg_apply(law, reg(mu), u);
          const double gm = yosida_apply(law, reg(mu), y);
          CHECK(std::abs(mu * y + gm - u) <= 1e-8);
        }
      }
    }
  }
}

TEST_CASE("ell_reg_derivative matches finite differences and the Lipschitz cap") {
  CHECK(ell_reg_derivative(kLin, reg(1.0), 12.34) == Approx(2.0 / 3.0).margin(1e-15));

  for (const auto& law : all_laws()) {
    for (double mu : {1.0, 0.1, 1e-2}) {
      for (double u : {-5.0, -0.7, 0.12, 1.0, 6.0}) {
        const double d = ell_reg_derivative(law, reg(mu), u);
        CHECK(d > 0.0);
        CHECK(d <= 1.0 / mu + 1e-10);
        const double h = 1e-6 * std::max(1.0, std::abs(u));
        const double fd =
            (ell_reg_apply(law, reg(mu), u + h) - ell_reg_apply(law, reg(mu), u - h)) / (2.0 * h);
        CHECK(d == Approx(fd).epsilon(1e-6).margin(1e-8));
      }
    }
  }
}

TEST_CASE("jstar_moreau is the Moreau envelope of j*") {
  SECTION("linear closed form") {
    CHECK(jstar_moreau(kLin, reg(1.0), 2.0) == Approx(1.0).margin(1e-15));
    for (double mu : {1.0, 0.25}) {
      for (double w : {-3.0, 0.5, 8.0}) {
        CHECK(jstar_moreau(kLin, reg(mu), w) == Approx(w * w / (2.0 * (1.0 + mu))).margin(1e-12));
      }
    }
  }

  SECTION("frozen logarithmic value and envelope bound") {
    CHECK(jstar_moreau(kLog, reg(1.0), 0.0) ==
          Approx(oracle::kJstarMoreauLogMu1W0).margin(1e-12));
    CHECK(0.5 * oracle::kOmega * oracle::kOmega + std::exp(-oracle::kOmega) ==
          Approx(oracle::kJstarMoreauLogMu1W0).margin(1e-15));
    for (const auto& law : all_laws()) {
      for (double mu : {1.0, 0.1, 1e-3}) {
        for (double w = -6.0; w <= 6.0; w += 0.25) {
          CHECK(jstar_moreau(law, reg(mu), w) <= law.jstar(w) + 1e-10);
        }
      }
    }
  }

  SECTION("mu sweep increases toward j*(0) = 1 for the log law") {
    double prev = 0.0;
    for (double mu : {1.0, 0.3, 0.1, 0.03, 0.01, 1e-3, 1e-4}) {
      const double v = jstar_moreau(kLog, reg(mu), 0.0);
      CHECK(v > prev);
      prev = v;
    }
    CHECK(prev > 0.999);
    CHECK(prev < 1.0);
  }
}

TEST_CASE("coercivity_bound slack is nonnegative") {
  // Linear, mu = 1, u = 0: every term but the constant vanishes, and
  // c2bar = 1/2 + mu/4 = 3/4.
  CHECK(coercivity_bound(kLin, reg(1.0), 0.0) == Approx(0.75).margin(1e-15));
  CHECK(coercivity_bound(kLog, reg(0.1), 5.0) >= 0.0);

  for (const auto& law : all_laws()) {
    for (double mu : {1.0, 0.1, 0.01}) {
      for (double u = -10.0; u <= 10.0; u += 0.125) {
        CHECK(coercivity_bound(law, reg(mu), u) >= -1e-13);
      }
    }
  }
}

TEST_CASE("regularization monotonicity, Lipschitz bound, and log-law consistency") {
  for (const auto& law : all_laws()) {
    for (double mu : {1.0, 0.1, 1e-2, 1e-3}) {
      double prev_u = -15.0;
      double prev_y = ell_reg_apply(law, reg(mu), prev_u);
      for (double u = -14.5; u <= 15.0; u += 0.5) {
        const double y = ell_reg_apply(law, reg(mu), u);
        CHECK(y >= prev_y - 1e-12);
        CHECK(y - prev_y <= (u - prev_u) / mu + 1e-10);
        prev_u = u;
        prev_y = y;
      }
    }
  }

  // Log law: gamma(rho_mu(L_mu(u))) = u - mu*L_mu(u) > 0 strictly. The slack
  // is ~e^{u/mu} for u < 0, so sample pairs where it stays representable.
  for (double mu : {1.0, 1e-2, 1e-4}) {
    for (double u : {-6.0 * mu, -mu, 0.0, 0.5, 9.0}) {
      const double y = ell_reg_apply(kLog, reg(mu), u);
      const double slack = u - mu * y;
      CHECK(slack > 0.0);
      CHECK(std::abs(gamma_apply(kLog, resolvent(kLog, reg(mu), y)) - slack) <= 1e-8);
    }
  }
}

TEST_CASE("parameter validation and iteration budget") {
  CHECK_THROWS_AS(resolvent(kLog, RegParams{0.0, 1e-12, 100}, 1.0), ValidationError);
  CHECK_THROWS_AS(resolvent(kLog, RegParams{-1.0, 1e-12, 100}, 1.0), ValidationError);
  CHECK_THROWS_AS(ThermalLaw::power_law(0.0), ValidationError);
  CHECK_THROWS_AS(resolvent(kLog, RegParams{1.0, 1e-12, 1}, 17.0), NoConvergence);
}
