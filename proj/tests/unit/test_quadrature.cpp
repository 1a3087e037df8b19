#include <cmath>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "volwealth/closed_form.hpp"
#include "volwealth/quadrature.hpp"

using namespace volwealth;
namespace cf = volwealth::closed_form;
namespace quad = volwealth::quadrature;

namespace {

// u = -exp(-c): strictly concave, no closed form for V.
Utility cara() {
  return Utility::custom("cara", [](double c) {
    const double e = std::exp(-c);
    return UtilityDerivs{-e, e, -e, e};
  });
}

// The power-negative family re-entered through the generic interface.
Utility custom_power_neg(double g) {
  return Utility::custom("power_neg_custom", [g](double c) {
    const auto d = oracle::power_neg(g, c);
    return UtilityDerivs{d[0], d[1], d[2], d[3]};
  });
}

struct Case {
  Utility u;
  EconomyParams p;
};

std::vector<Case> closed_cases() {
  std::vector<Case> cs;
  for (double sigma : {0.0, 0.05, 0.11})
    for (double delta : {0.02, 0.1}) {
      const EconomyParams p{0.025, sigma, 0.01, delta, 1.5};
      for (double g : {0.5, 2.0})
        if (sigma < 0.95 * critical_sigma(p, g)) cs.push_back({Utility::power_neg(g), p});
      for (double b : {0.25, 0.75}) cs.push_back({Utility::power_pos(b), p});
      cs.push_back({Utility::log(), p});
    }
  return cs;
}

}  // namespace

TEST_CASE("worked examples") {
  CHECK(std::abs(quad::value({0.045, 0.1, 0.04, 0.05, 25.0}, Utility::log())) < 1e-10);
  CHECK(quad::value({0.04, 0.1, 0.03, 0.05, 1.0}, Utility::power_pos(0.5)) ==
        doctest::Approx(std::sqrt(0.03) / 0.04625).epsilon(1e-6));
  CHECK(quad::value({0.02, 0.0, 0.02, 0.05, 50.0}, Utility::power_neg(1.0)) ==
        doctest::Approx(-20.0).epsilon(1e-6));
}

TEST_CASE("every report field matches the closed forms") {
  for (const auto& [u, p] : closed_cases()) {
    INFO(u.describe(), " ", describe(p));
    const auto q = quad::report(p, u);
    const auto c = cf::evaluate(p, u).report;
    CHECK(oracle::rel_err(q.value, c.value) < 1e-8);
    CHECK(oracle::rel_err(q.accounting_price, c.accounting_price) < 1e-8);
    CHECK(oracle::rel_err(q.second_derivative, c.second_derivative) < 1e-8);
    CHECK(oracle::rel_err(q.price_term, c.price_term) < 1e-8);
    CHECK(oracle::rel_err(q.dV_dt, c.dV_dt) < 1e-8);
    if (p.sigma > 0) {
      CHECK(oracle::rel_err(q.ito_term, c.ito_term) < 1e-8);
      CHECK(oracle::rel_err(q.dV_dsigma, c.dV_dsigma) < 1e-8);
    } else {
      CHECK(q.ito_term == 0.0);
      CHECK(q.dV_dsigma == 0.0);
    }
    CHECK(oracle::rel_err(quad::dV_dnu(p, u), cf::dV_dnu_closed(u, p)) < 1e-8);
    if (u.family() != UtilityFamily::Log && p.sigma > 0)
      CHECK(oracle::rel_err(quad::dp_dsigma(p, u), cf::dp_dsigma_closed(u, p)) < 1e-8);
  }
}

TEST_CASE("independent double-integral oracle, including a utility with no closed form") {
  const EconomyParams p{0.03, 0.08, 0.02, 0.05, 2.0};
  struct Probe {
    Utility u;
    std::array<double, 4> (*derivs)(double);
    double q;  // power of C the integrand behaves like
  };
  const std::vector<Probe> probes{
      {Utility::power_neg(2.0), [](double c) { return oracle::power_neg(2.0, c); }, -2.0},
      {Utility::power_pos(0.5), [](double c) { return oracle::power_pos(0.5, c); }, 0.5},
      {Utility::log(), [](double c) { return oracle::log(c); }, 0.0},
      {cara(), [](double c) { const double e = std::exp(-c); return std::array{-e, e, -e, e}; }, 0.0},
  };
  for (const auto& pr : probes) {
    INFO(pr.u.describe());
    auto f = pr.derivs;
    const double v = oracle::double_integral(p, [&](double c) { return f(c)[0]; }, pr.q);
    const double m = oracle::double_integral(p, [&](double c) { return f(c)[1] * c; }, pr.q);
    const double k = oracle::double_integral(p, [&](double c) { return f(c)[2] * c * c; }, pr.q);
    const double ks = oracle::double_integral(p, [&](double c) { return f(c)[2] * c * c; }, pr.q, 1);
    const double mt = oracle::double_integral(p, [&](double c) { return f(c)[1] * c; }, pr.q, 1);
    CHECK(oracle::rel_err(quad::value(p, pr.u), v) < 1e-8);
    CHECK(oracle::rel_err(quad::accounting_price(p, pr.u), m / p.k0) < 1e-8);
    CHECK(oracle::rel_err(quad::second_derivative(p, pr.u), k / (p.k0 * p.k0)) < 1e-8);
    CHECK(oracle::rel_err(quad::dV_dsigma(p, pr.u), p.sigma * ks) < 1e-8);
    CHECK(oracle::rel_err(quad::dV_dnu(p, pr.u), m / p.nu - mt) < 1e-7);
  }
}

TEST_CASE("closed-form-derived special values") {
  const EconomyParams p{0.06, 0.2, 0.02, 0.05, 3.0};
  const auto u = Utility::log();
  CHECK(quad::accounting_price(p, u) == doctest::Approx(1 / (p.delta * p.k0)).epsilon(1e-10));
  CHECK(quad::dV_dsigma(p, u) == doctest::Approx(-p.sigma / (p.delta * p.delta)).epsilon(1e-10));
  CHECK(quad::ito_term(p, u) == doctest::Approx(-p.sigma * p.sigma / (2 * p.delta)).epsilon(1e-10));
  CHECK(quad::dV_dt(p, u) == doctest::Approx((0.04 - 0.02) / p.delta).epsilon(1e-10));
  CHECK(quad::dV_dnu(p, u) == doctest::Approx(1 / (p.delta * p.nu) - 1 / (p.delta * p.delta)).epsilon(1e-10));
  EconomyParams at_delta = p;
  at_delta.nu = p.delta;
  CHECK(std::abs(quad::dV_dnu(at_delta, u)) < 1e-8 * std::abs(quad::value(at_delta, u)));

  // mu = nu, sigma = 0: nothing changes.
  CHECK(quad::dV_dt({0.02, 0.0, 0.02, 0.05, 1.0}, Utility::power_neg(1.0)) == 0.0);

  // gamma = 1: dp/dk0 relation p = -gamma V / k0 and the envelope at nu*.
  const EconomyParams q{0.05, 0.1, 0.02, 0.03, 1.0};
  const auto pn = Utility::power_neg(1.0);
  CHECK(quad::accounting_price(q, pn) == doctest::Approx(-quad::value(q, pn) / q.k0).epsilon(1e-6));
  const auto pp = Utility::power_pos(0.5);
  CHECK(quad::accounting_price(q, pp) == doctest::Approx(0.5 * quad::value(q, pp) / q.k0).epsilon(1e-6));
  EconomyParams opt = q;
  opt.nu = 0.035;
  CHECK(std::abs(quad::dV_dnu(opt, pn)) <= 1e-8 * std::abs(quad::value(opt, pn)));

  // Ito term for gamma = 1 is (sigma^2/2) gamma (1 + gamma) V.
  CHECK(quad::ito_term(q, pn) == doctest::Approx(0.5 * q.sigma * q.sigma * 2 * quad::value(q, pn)).epsilon(1e-8));
}

TEST_CASE("derivatives match central differences of value") {
  const std::vector<Utility> us{Utility::power_neg(1.0), Utility::power_pos(0.5), Utility::log(), cara()};
  const EconomyParams p{0.03, 0.12, 0.02, 0.05, 2.0};
  for (const auto& u : us) {
    INFO(u.describe());
    auto V = [&](double EconomyParams::*f) {
      return [&, f](double x) {
        EconomyParams q = p;
        q.*f = x;
        return quad::value(q, u);
      };
    };
    auto P = [&](double s) {
      EconomyParams q = p;
      q.sigma = s;
      return quad::accounting_price(q, u);
    };
    CHECK(oracle::rel_err(oracle::central(V(&EconomyParams::k0), p.k0, 1e-5 * p.k0),
                          quad::accounting_price(p, u)) < 1e-4);
    CHECK(oracle::rel_err(oracle::second_central(V(&EconomyParams::k0), p.k0, 1e-3 * p.k0),
                          quad::second_derivative(p, u)) < 1e-4);
    CHECK(oracle::rel_err(oracle::central(V(&EconomyParams::sigma), p.sigma, 1e-5),
                          quad::dV_dsigma(p, u)) < 1e-4);
    CHECK(oracle::rel_err(oracle::central(V(&EconomyParams::nu), p.nu, 1e-5), quad::dV_dnu(p, u)) < 1e-4);
    const double dp = quad::dp_dsigma(p, u);
    const double dp_fd = oracle::central(P, p.sigma, 1e-5);
    if (u.family() == UtilityFamily::Log)
      CHECK(std::abs(dp_fd) < 1e-10);
    else
      CHECK((dp > 0) == (dp_fd > 0));
  }
}

TEST_CASE("sign properties and the decomposition identity for concave utilities") {
  const std::vector<Utility> us{Utility::power_neg(0.5), Utility::power_pos(0.75), Utility::log(), cara()};
  for (const auto& u : us)
    for (double sigma : {0.02, 0.1, 0.2}) {
      const EconomyParams p{0.03, sigma, 0.02, 0.08, 1.0};
      INFO(u.describe(), " sigma=", sigma);
      // cara's tau-decay is not exponential; 128 Laguerre nodes fall just short at sigma=0.2.
      quad::QuadratureConfig cfg;
      cfg.n_laguerre = 256;
      const auto r = quad::report(p, u, cfg);
      CHECK(r.dV_dsigma < 0);
      CHECK(r.ito_term < 0);
      CHECK(r.dV_dt < r.price_term);
      CHECK(oracle::rel_err(quad::dV_dt(p, u, cfg), r.price_term + r.ito_term) < 1e-8);
    }
}

TEST_CASE("integration by parts holds slice by slice") {
  // E[sqrt(tau) z u'(C) C] = sigma tau E[(u''(C) C + u'(C)) C].
  const std::vector<std::pair<Utility, double>> us{
      {Utility::power_neg(1.5), -1.5}, {Utility::power_pos(0.4), 0.4}, {Utility::log(), 0.0}, {cara(), 0.0}};
  const EconomyParams p{0.03, 0.2, 0.02, 0.05, 1.0};
  for (const auto& [u, q] : us)
    for (double tau : {0.5, 5.0, 40.0}) {
      INFO(u.describe(), " tau=", tau);
      const double lhs = oracle::gaussian_mean(
          [&](double z) {
            const double c = oracle::consumption(p, tau, z);
            return std::sqrt(tau) * z * u.derivs(c).d1 * c;
          },
          q * p.sigma * std::sqrt(tau));
      const double marginal = quad::slice_expectation(p, u, tau, quad::Weight::Marginal).value();
      const double curvature = quad::slice_expectation(p, u, tau, quad::Weight::Curvature).value();
      const double rhs = p.sigma * tau * (curvature + marginal);
      if (u.family() == UtilityFamily::Log)
        CHECK(std::abs(lhs - rhs) < 1e-12);  // both sides vanish
      else
        CHECK(oracle::rel_err(lhs, rhs) < 1e-8);
    }
}

TEST_CASE("ito_expansion") {
  CHECK(quad::ito_expansion(0.7, 2.0, -3.0, 0.0, 0.0) == 0.7);
  CHECK(quad::ito_expansion(0.7, 2.0, -3.0, 0.5, 0.0) == doctest::Approx(0.7 + 1.0));
  const EconomyParams p{0.06, 0.2, 0.02, 0.05, 3.0};
  const auto c = cf::value_log(p).report;
  const double got = quad::ito_expansion(0.0, c.accounting_price, c.second_derivative, (p.mu - p.nu) * p.k0,
                                         p.sigma * p.k0);
  CHECK(got == doctest::Approx((p.mu - p.nu - p.sigma * p.sigma / 2) / p.delta).epsilon(1e-14));
}

TEST_CASE("divergence and configuration errors") {
  const EconomyParams p{0.05, 0.3, 0.02, 0.03, 1.0};
  CHECK_THROWS_AS(quad::value(p, Utility::power_neg(1.0)), DivergenceError);
  // Through the generic interface the guard has to notice on its own.
  CHECK_THROWS_AS(quad::value(p, custom_power_neg(1.0)), DivergenceDetected);
  EconomyParams ok = p;
  ok.sigma = 0.1;
  CHECK(quad::value(ok, custom_power_neg(1.0)) ==
        doctest::Approx(cf::value_power_neg(ok, 1.0).report.value).epsilon(1e-8));

  quad::QuadratureConfig bad;
  bad.n_hermite = 4;
  CHECK_THROWS_AS(quad::value(ok, Utility::log(), bad), DomainError);
  bad = {};
  bad.rel_tol = 0.1;
  CHECK_THROWS_AS(quad::value(ok, Utility::log(), bad), DomainError);
  bad.rel_tol = 0.0;
  CHECK_THROWS_AS(quad::value(ok, Utility::log(), bad), DomainError);
}

TEST_CASE("coarse rules agree with the default within their own tolerance") {
  quad::QuadratureConfig coarse;
  coarse.n_hermite = 16;
  coarse.n_laguerre = 32;
  coarse.rel_tol = 1e-6;
  const EconomyParams p{0.025, 0.1, 0.01, 0.05, 1.5};
  for (const auto& u : {Utility::power_neg(1.0), Utility::power_pos(0.5), Utility::log()})
    CHECK(oracle::rel_err(quad::value(p, u, coarse), cf::evaluate(p, u).report.value) < 1e-6);
}

TEST_CASE("the refinement pass refuses a fixed-rule result it cannot confirm") {
  const EconomyParams p{0.03, 0.2, 0.02, 0.08, 1.0};
  const double truth = oracle::double_integral(p, [](double c) { return -std::exp(-c) * c * c; }, 0.0);
  try {
    quad::integrate(p, cara(), {quad::Weight::Curvature, 0});
    FAIL("expected ToleranceNotMet");
  } catch (const ToleranceNotMet& e) {
    // The adaptive value is the accurate one; the 128-node rule is off by ~1e-8.
    CHECK(oracle::rel_err(e.check(), truth) < 1e-11);
    CHECK(oracle::rel_err(e.primary(), truth) > 1e-8);
  }
  quad::QuadratureConfig cfg;
  cfg.n_laguerre = 256;
  CHECK(oracle::rel_err(quad::integrate(p, cara(), {quad::Weight::Curvature, 0}, cfg), truth) < 1e-10);
}
