#pragma once

#include <optional>

#include "volwealth/econ.hpp"

// Exact results for the three constant-elasticity utility families.
namespace volwealth::closed_form {

struct ClosedFormResult {
  ValueReport report;
  /// Critical volatility; power-negative family only.
  std::optional<double> sigma_c;
  /// Consumption rate maximizing V (may be <= 0 when no interior optimum).
  double nu_star = 0.0;
  /// Denominator close to zero; see Validation::near_boundary.
  bool near_boundary = false;
};

/// u = -c^-gamma. Throws DivergenceError when sigma >= sigma_c.
ClosedFormResult value_power_neg(const EconomyParams& p, double gamma);
/// u = c^beta. Throws DivergenceError when the denominator is <= 0.
ClosedFormResult value_power_pos(const EconomyParams& p, double beta);
/// u = ln c. Always convergent.
ClosedFormResult value_log(const EconomyParams& p);

/// Dispatch on the family, honouring a consumption rescaling of u.
/// Throws DomainError for custom utilities.
ClosedFormResult evaluate(const EconomyParams& p, const Utility& u);

double dV_dsigma_closed(const Utility& u, const EconomyParams& p);
double dV_dnu_closed(const Utility& u, const EconomyParams& p);
/// dp/dsigma at fixed nu.
double dp_dsigma_closed(const Utility& u, const EconomyParams& p);
/// nu* (independent of the nu stored in p).
double nu_star_closed(const Utility& u, const EconomyParams& p);
/// d nu* / d sigma: -gamma sigma, +beta sigma, 0.
double dnu_star_dsigma_closed(const Utility& u, const EconomyParams& p);

}  // namespace volwealth::closed_form
