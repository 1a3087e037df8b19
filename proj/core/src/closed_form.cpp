#include "volwealth/closed_form.hpp"

#include <cmath>

namespace volwealth::closed_form {

namespace {

void require_known(const Utility& u) {
  if (!u.is_closed_form_family())
    throw DomainError("closed form is available only for power_neg, power_pos and log utilities");
}

// Consumption base s * nu * k0 including any rescaling of u.
double base(const EconomyParams& p, const Utility& u) { return u.scale() * p.consumption0(); }

ClosedFormResult power_neg(const EconomyParams& p, const Utility& u) {
  const double g = std::get<PowerNegUtility>(u.kind()).gamma;
  require_convergent(p, u);
  const Validation v = validate(p, u);
  const double D = *v.denominator;
  const double s2 = p.sigma * p.sigma;
  const double a = std::pow(base(p, u), -g);

  ClosedFormResult r;
  auto& rep = r.report;
  rep.value = -a / D;
  rep.accounting_price = g * a / (p.k0 * D);
  rep.second_derivative = g * (1.0 + g) * rep.value / (p.k0 * p.k0);
  rep.price_term = g * (p.mu - p.nu) * a / D;
  rep.ito_term = 0.5 * s2 * g * (1.0 + g) * rep.value;
  rep.dV_dt = rep.price_term + rep.ito_term;
  rep.dV_dsigma = -a * g * (1.0 + g) * p.sigma / (D * D);
  r.sigma_c = v.sigma_c;
  r.nu_star = (p.delta + g * p.mu) / (1.0 + g) - g * s2 / 2.0;
  r.near_boundary = v.near_boundary;
  return r;
}

ClosedFormResult power_pos(const EconomyParams& p, const Utility& u) {
  const double b = std::get<PowerPosUtility>(u.kind()).beta;
  require_convergent(p, u);
  const Validation v = validate(p, u);
  const double D = *v.denominator;
  const double s2 = p.sigma * p.sigma;
  const double a = std::pow(base(p, u), b);

  ClosedFormResult r;
  auto& rep = r.report;
  rep.value = a / D;
  rep.accounting_price = b * rep.value / p.k0;
  rep.second_derivative = b * (b - 1.0) * rep.value / (p.k0 * p.k0);
  rep.price_term = b * (p.mu - p.nu) * a / D;
  rep.ito_term = 0.5 * s2 * b * (b - 1.0) * rep.value;
  rep.dV_dt = rep.price_term + rep.ito_term;
  rep.dV_dsigma = -a * b * (1.0 - b) * p.sigma / (D * D);
  r.nu_star = (p.delta - b * p.mu) / (1.0 - b) + b * s2 / 2.0;
  r.near_boundary = v.near_boundary;
  return r;
}

ClosedFormResult log_family(const EconomyParams& p, const Utility& u) {
  check_params(p);
  const double d = p.delta;
  const double s2 = p.sigma * p.sigma;

  ClosedFormResult r;
  auto& rep = r.report;
  rep.value = std::log(base(p, u)) / d + p.log_drift() / (d * d);
  rep.accounting_price = 1.0 / (d * p.k0);
  rep.second_derivative = -1.0 / (d * p.k0 * p.k0);
  rep.price_term = (p.mu - p.nu) / d;
  rep.ito_term = -0.5 * s2 / d;
  // Equals (mu - nu - sigma^2/2) / delta.
  rep.dV_dt = rep.price_term + rep.ito_term;
  rep.dV_dsigma = -p.sigma / (d * d);
  r.nu_star = d;
  return r;
}

}  // namespace

ClosedFormResult value_power_neg(const EconomyParams& p, double gamma) {
  return power_neg(p, Utility::power_neg(gamma));
}

ClosedFormResult value_power_pos(const EconomyParams& p, double beta) {
  return power_pos(p, Utility::power_pos(beta));
}

ClosedFormResult value_log(const EconomyParams& p) { return log_family(p, Utility::log()); }

ClosedFormResult evaluate(const EconomyParams& p, const Utility& u) {
  switch (u.family()) {
    case UtilityFamily::PowerNeg: return power_neg(p, u);
    case UtilityFamily::PowerPos: return power_pos(p, u);
    case UtilityFamily::Log: return log_family(p, u);
    case UtilityFamily::Custom: break;
  }
  require_known(u);
  return {};
}

double dV_dsigma_closed(const Utility& u, const EconomyParams& p) {
  require_known(u);
  return evaluate(p, u).report.dV_dsigma;
}

double dV_dnu_closed(const Utility& u, const EconomyParams& p) {
  require_known(u);
  const auto r = evaluate(p, u);
  const double V = r.report.value;
  switch (u.family()) {
    case UtilityFamily::PowerNeg: {
      const double g = std::get<PowerNegUtility>(u.kind()).gamma;
      const double D = *closed_form_denominator(p, u);
      return V * (-g / p.nu + g / D);
    }
    case UtilityFamily::PowerPos: {
      const double b = std::get<PowerPosUtility>(u.kind()).beta;
      const double D = *closed_form_denominator(p, u);
      return V * (b / p.nu - b / D);
    }
    default:
      return 1.0 / (p.delta * p.nu) - 1.0 / (p.delta * p.delta);
  }
}

double dp_dsigma_closed(const Utility& u, const EconomyParams& p) {
  require_known(u);
  const auto r = evaluate(p, u);
  switch (u.family()) {
    case UtilityFamily::PowerNeg: {
      // p = -gamma V / k0
      const double g = std::get<PowerNegUtility>(u.kind()).gamma;
      return -g * r.report.dV_dsigma / p.k0;
    }
    case UtilityFamily::PowerPos: {
      const double b = std::get<PowerPosUtility>(u.kind()).beta;
      return b * r.report.dV_dsigma / p.k0;
    }
    default:
      return 0.0;
  }
}

double nu_star_closed(const Utility& u, const EconomyParams& p) {
  require_known(u);
  check_params(p);
  const double s2 = p.sigma * p.sigma;
  switch (u.family()) {
    case UtilityFamily::PowerNeg: {
      const double g = std::get<PowerNegUtility>(u.kind()).gamma;
      return (p.delta + g * p.mu) / (1.0 + g) - g * s2 / 2.0;
    }
    case UtilityFamily::PowerPos: {
      const double b = std::get<PowerPosUtility>(u.kind()).beta;
      return (p.delta - b * p.mu) / (1.0 - b) + b * s2 / 2.0;
    }
    default:
      return p.delta;
  }
}

double dnu_star_dsigma_closed(const Utility& u, const EconomyParams& p) {
  require_known(u);
  switch (u.family()) {
    case UtilityFamily::PowerNeg: return -std::get<PowerNegUtility>(u.kind()).gamma * p.sigma;
    case UtilityFamily::PowerPos: return std::get<PowerPosUtility>(u.kind()).beta * p.sigma;
    default: return 0.0;
  }
}

}  // namespace volwealth::closed_form
