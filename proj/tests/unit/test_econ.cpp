#include <cmath>
#include <limits>

#include <doctest.h>

#include "oracles.hpp"
#include "volwealth/closed_form.hpp"
#include "volwealth/econ.hpp"
#include "volwealth/quadrature.hpp"

using namespace volwealth;

TEST_CASE("validate at the worked example points") {
  const EconomyParams p{0.05, 0.1, 0.02, 0.03, 1.0};
  const auto v = validate(p, Utility::power_neg(1.0));
  CHECK(v.convergence == ConvergenceClass::Convergent);
  REQUIRE(v.denominator);
  CHECK(*v.denominator == doctest::Approx(0.05).epsilon(1e-14));
  REQUIRE(v.sigma_c);
  CHECK(*v.sigma_c == doctest::Approx(std::sqrt(0.06)).epsilon(1e-14));

  // sigma_c^2 = 2 (0.03 + 0.03) / 2 = 0.06: the denominator is exactly zero.
  EconomyParams at = p;
  at.sigma = std::sqrt(0.06);
  CHECK(validate(at, Utility::power_neg(1.0)).convergence == ConvergenceClass::DivergentNegative);

  EconomyParams wild{0.3, 2.0, 0.01, 0.001, 5.0};
  CHECK(validate(wild, Utility::log()).convergent());
  CHECK_FALSE(validate(wild, Utility::log()).denominator);
}

TEST_CASE("check_params rejects values outside the domain") {
  const EconomyParams ok{0.05, 0.1, 0.02, 0.03, 1.0};
  CHECK_NOTHROW(check_params(ok));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (auto bad : {EconomyParams{nan, 0.1, 0.02, 0.03, 1.0}, EconomyParams{0.05, -0.1, 0.02, 0.03, 1.0},
                   EconomyParams{0.05, 0.1, 0.0, 0.03, 1.0}, EconomyParams{0.05, 0.1, 0.02, -0.03, 1.0},
                   EconomyParams{0.05, 0.1, 0.02, 0.03, 0.0},
                   EconomyParams{0.05, std::numeric_limits<double>::infinity(), 0.02, 0.03, 1.0}}) {
    CHECK_THROWS_AS(check_params(bad), DomainError);
    CHECK_THROWS_AS(validate(bad, Utility::log()), DomainError);
  }
}

TEST_CASE("validate agrees with the hand-computed denominators") {
  int convergent = 0, divergent = 0;
  for (double mu : {-0.02, 0.01, 0.05, 0.12})
    for (double nu : {0.01, 0.04, 0.1})
      for (double delta : {0.01, 0.05})
        for (double sigma : {0.0, 0.1, 0.25, 0.5, 0.9}) {
          const EconomyParams p{mu, sigma, nu, delta, 2.0};
          for (double g : {0.5, 2.0}) {
            const double d = delta + g * (mu - nu) - g * (1 + g) * sigma * sigma / 2;
            const auto v = validate(p, Utility::power_neg(g));
            CHECK(v.convergent() == (d > 0));
            if (v.convergent()) {
              CHECK(*v.denominator > 0);
              CHECK_NOTHROW(closed_form::value_power_neg(p, g));
              ++convergent;
            } else {
              CHECK(v.convergence == ConvergenceClass::DivergentNegative);
              ++divergent;
            }
          }
          for (double b : {0.3, 0.8}) {
            const double d = delta - b * (mu - nu) + b * (1 - b) * sigma * sigma / 2;
            const auto v = validate(p, Utility::power_pos(b));
            CHECK(v.convergent() == (d > 0));
            if (!v.convergent()) CHECK(v.convergence == ConvergenceClass::DivergentPositive);
            CHECK_FALSE(v.sigma_c);
          }
        }
  // The grid exercises both outcomes.
  CHECK(convergent > 20);
  CHECK(divergent > 20);
}

TEST_CASE("critical sigma") {
  const EconomyParams p{0.05, 0.0, 0.02, 0.03, 1.0};
  for (double g : {0.5, 1.0, 3.0}) {
    const double want = std::sqrt(2 * (0.03 + g * 0.03) / (g * (1 + g)));
    CHECK(critical_sigma(p, g) == doctest::Approx(want).epsilon(1e-14));
  }
  // Divergent even without noise.
  CHECK(critical_sigma({0.0, 0.0, 0.5, 0.01, 1.0}, 1.0) == 0.0);
}

TEST_CASE("near-boundary flag and require_convergent") {
  EconomyParams p{0.05, 0.0, 0.02, 0.03, 1.0};
  p.sigma = critical_sigma(p, 1.0) * (1 - 1e-13);
  const auto v = validate(p, Utility::power_neg(1.0));
  if (v.convergent()) CHECK(v.near_boundary);
  p.sigma = 0.1;
  CHECK_FALSE(validate(p, Utility::power_neg(1.0)).near_boundary);

  p.sigma = 0.3;
  try {
    require_convergent(p, Utility::power_neg(1.0));
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(e.convergence() == ConvergenceClass::DivergentNegative);
    REQUIRE(e.sigma_c());
    CHECK(*e.sigma_c() == doctest::Approx(std::sqrt(0.06)));
    CHECK(std::string(e.what()).find("sigma_c") != std::string::npos);
  }
  CHECK(std::string(to_string(ConvergenceClass::DivergentPositive)) == "divergent_positive");
}

TEST_CASE("depreciation wrapper") {
  const EconomyParams p{0.05, 0.1, 0.02, 0.03, 1.0};

  SUBCASE("zero rate is the identity") {
    const auto d = apply_depreciation(p, Utility::power_neg(1.0), 0.0);
    CHECK(d.params.nu == p.nu);
    CHECK(d.params.mu == p.mu);
    CHECK(d.utility.scale() == 1.0);
  }
  SUBCASE("nu -> nu + rate, u(x) -> u((1 + rate/nu) x)") {
    const auto u = Utility::power_pos(0.5);
    const auto d = apply_depreciation(p, u, 0.01);
    CHECK(d.params.nu == doctest::Approx(0.03));
    CHECK(d.utility.scale() == doctest::Approx(1.5));
    for (double x : {0.1, 1.0, 4.0}) CHECK(d.utility(x) == doctest::Approx(u(1.5 * x)));
  }
  SUBCASE("log value shifts by ln(1 + rate/nu)/delta") {
    const double rate = 0.01;
    const auto d = apply_depreciation(p, Utility::log(), rate);
    EconomyParams plain = p;
    plain.nu = p.nu + rate;
    const double shift = std::log(1 + rate / p.nu) / p.delta;
    const double v_dep = closed_form::evaluate(d.params, d.utility).report.value;
    const double v_plain = closed_form::value_log(plain).report.value;
    CHECK(v_dep - v_plain == doctest::Approx(shift).epsilon(1e-12));
    // The quadrature backend sees the same wrapper.
    CHECK(quadrature::value(d.params, d.utility) == doctest::Approx(v_dep).epsilon(1e-9));
  }
  CHECK_THROWS_AS(apply_depreciation(p, Utility::log(), -0.01), DomainError);
}

TEST_CASE("log drift and initial consumption helpers") {
  const EconomyParams p{0.05, 0.2, 0.02, 0.03, 4.0};
  CHECK(p.log_drift() == doctest::Approx(0.01));
  CHECK(p.consumption0() == doctest::Approx(0.08));
  CHECK(describe(p).find("sigma=0.2") != std::string::npos);
}
