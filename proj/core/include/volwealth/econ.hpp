#pragma once

#include <optional>
#include <string>

#include "volwealth/errors.hpp"
#include "volwealth/utility.hpp"

namespace volwealth {

/// A single-capital economy with multiplicative noise,
///   dk = (mu - nu) k dt + sigma k dW,   consumption c = nu k,
/// valued at discount rate delta from initial stock k0.
struct EconomyParams {
  double mu = 0.0;     // expected production rate, 1/time
  double sigma = 0.0;  // volatility, 1/sqrt(time)
  double nu = 0.0;     // consumption rate, 1/time
  double delta = 0.0;  // discount rate, 1/time
  double k0 = 1.0;     // initial capital stock

  /// Drift of ln k: mu - nu - sigma^2/2.
  double log_drift() const noexcept { return mu - nu - 0.5 * sigma * sigma; }
  /// Initial consumption flow nu * k0.
  double consumption0() const noexcept { return nu * k0; }
};

/// Throws DomainError unless all fields are finite, sigma >= 0 and
/// nu, delta, k0 > 0.
void check_params(const EconomyParams& p);

/// Result of classifying an economy/utility pair.
struct Validation {
  ConvergenceClass convergence = ConvergenceClass::Convergent;
  /// Closed-form denominator D (absent for custom utilities and the log family).
  std::optional<double> denominator;
  /// Critical volatility (power-negative family only).
  std::optional<double> sigma_c;
  /// Set when |D| < 1e-10 (delta + |mu| + nu): quadrature and Monte Carlo
  /// lose accuracy there.
  bool near_boundary = false;

  bool convergent() const noexcept { return convergence == ConvergenceClass::Convergent; }
};

/// Classify convergence of the value integral. Divergence is declared when
/// the closed-form denominator is <= 0, where "0" means within a few ulps of
/// the magnitudes that were summed to form it.
Validation validate(const EconomyParams& p, const Utility& u);

/// Throws DivergenceError carrying the class and sigma_c if not convergent.
void require_convergent(const EconomyParams& p, const Utility& u);

/// Power-negative critical volatility sqrt(2 (delta + gamma (mu - nu)) / (gamma (1 + gamma))).
/// Returns 0 when the economy diverges even without noise.
double critical_sigma(const EconomyParams& p, double gamma);

/// Closed-form denominator for the power families:
///   PowerNeg: delta + gamma (mu - nu) - gamma (1 + gamma) sigma^2 / 2
///   PowerPos: delta - beta (mu - nu) + beta (1 - beta) sigma^2 / 2
/// nullopt for the log family and custom utilities.
std::optional<double> closed_form_denominator(const EconomyParams& p, const Utility& u);

struct DepreciatedEconomy {
  EconomyParams params;
  Utility utility;
};

/// Fold capital depreciation at `rate` into consumption: nu -> nu + rate and
/// u(x) -> u((1 + rate / nu) x), with nu the original consumption rate.
DepreciatedEconomy apply_depreciation(const EconomyParams& p, const Utility& u, double rate);

/// V together with the pieces of its expected rate of change.
struct ValueReport {
  double value = 0.0;              // V, utils
  double accounting_price = 0.0;   // dV/dk0
  double second_derivative = 0.0;  // d2V/dk0^2
  double ito_term = 0.0;           // (sigma^2/2) k0^2 d2V/dk0^2
  double price_term = 0.0;         // (mu - nu) k0 p
  double dV_dt = 0.0;              // price_term + ito_term
  double dV_dsigma = 0.0;          // dV/dsigma at fixed nu
};

std::string describe(const EconomyParams& p);

}  // namespace volwealth
