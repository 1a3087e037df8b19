#include "volwealth/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "volwealth/gauss_rules.hpp"

namespace volwealth::quadrature {

namespace {

SignedLog weight_of(const ScaledLogDerivs& d, Weight w, const EconomyParams& p) {
  switch (w) {
    case Weight::Utility: return d[0];
    case Weight::Marginal: return d[1];
    case Weight::Curvature: return d[2];
    case Weight::PriceCurvature: return d[2].scaled(2.0) + d[3];
    case Weight::Drift:
      return d[1].scaled(p.mu - p.nu) + d[2].scaled(0.5 * p.sigma * p.sigma);
  }
  return {};
}

SignedLog abs_of(SignedLog x) { return {x.sign == 0 ? 0 : 1, x.log_abs}; }

// Sum of the magnitudes of the terms making up w, before any cancellation.
SignedLog magnitude_of(const ScaledLogDerivs& d, Weight w, const EconomyParams& p) {
  switch (w) {
    case Weight::PriceCurvature: return abs_of(d[2].scaled(2.0)) + abs_of(d[3]);
    case Weight::Drift:
      return abs_of(d[1].scaled(p.mu - p.nu)) + abs_of(d[2].scaled(0.5 * p.sigma * p.sigma));
    default: return abs_of(weight_of(d, w, p));
  }
}

SignedLog weight_at(const Utility& u, Weight w, const EconomyParams& p, double log_c) {
  return weight_of(u.scaled_log(log_c), w, p);
}

// Log-slope of |w| in log C when w behaves like a power of C around log_c;
// zero otherwise (sign change, zero, or visibly curved log-profile).
double local_elasticity(const Utility& u, Weight w, const EconomyParams& p, double log_c) {
  const SignedLog lo = weight_at(u, w, p, log_c - 1.0);
  const SignedLog mid = weight_at(u, w, p, log_c);
  const SignedLog hi = weight_at(u, w, p, log_c + 1.0);
  if (lo.sign == 0 || lo.sign != mid.sign || mid.sign != hi.sign) return 0.0;
  const double s1 = mid.log_abs - lo.log_abs;
  const double s2 = hi.log_abs - mid.log_abs;
  if (!std::isfinite(s1) || !std::isfinite(s2)) return 0.0;
  if (std::abs(s1 - s2) > 0.1 * std::max(std::abs(s1), std::abs(s2)) + 1e-12) return 0.0;
  return 0.5 * (s1 + s2);
}

std::string describe_point(const EconomyParams& p, const Utility& u) {
  return u.describe() + " at " + describe(p);
}

// Exponential decay rate r of tau -> e^{-delta tau} E_z[w] when the slice
// expectation is a pure exponential in tau, else delta.
struct RateFit {
  double rate;
  bool matched;
};

}  // namespace

void QuadratureConfig::validate() const {
  if (n_hermite < 8 || n_laguerre < 8) throw DomainError("quadrature node counts must be >= 8");
  if (!(rel_tol > 0.0 && rel_tol <= 1e-2)) throw DomainError("rel_tol must lie in (0, 1e-2]");
  if (!(divergence_guard >= 0.0) || !std::isfinite(divergence_guard))
    throw DomainError("divergence_guard must be finite and >= 0");
}

double consumption(const EconomyParams& p, double tau, double z) {
  return p.consumption0() * std::exp(p.log_drift() * tau + p.sigma * std::sqrt(tau) * z);
}

namespace {

// E_z[w] at one slice; `magnitude` (optional) receives E_z of the summed
// term magnitudes, the scale against which cancellation is judged.
SignedLog slice(const EconomyParams& p, const Utility& u, double tau, Weight w,
                const QuadratureConfig& cfg, SignedLog* magnitude) {
  const double x0 = std::log(p.consumption0()) + p.log_drift() * tau;
  const double spread = p.sigma * std::sqrt(tau);
  if (spread == 0.0) {
    const ScaledLogDerivs d = u.scaled_log(x0);
    if (magnitude) *magnitude = magnitude_of(d, w, p);
    return weight_of(d, w, p);
  }

  const auto rule = gauss_hermite(cfg.n_hermite);
  const double shift = spread * local_elasticity(u, w, p, x0);
  std::vector<SignedLog> terms(rule->size());
  std::vector<SignedLog> mags(magnitude ? rule->size() : 0);
  for (std::size_t j = 0; j < rule->size(); ++j) {
    const double y = rule->nodes[j];
    const double log_c = x0 + spread * (y + shift);
    const double log_w = rule->log_weights[j] - shift * y - 0.5 * shift * shift;
    const ScaledLogDerivs d = u.scaled_log(log_c);
    terms[j] = weight_of(d, w, p).shifted(log_w);
    if (magnitude) mags[j] = magnitude_of(d, w, p).shifted(log_w);
  }
  if (magnitude) *magnitude = log_sum(mags);
  return log_sum(terms);
}

}  // namespace

SignedLog slice_expectation(const EconomyParams& p, const Utility& u, double tau, Weight w,
                            const QuadratureConfig& cfg) {
  return slice(p, u, tau, w, cfg, nullptr);
}

namespace {

RateFit fit_rate(const EconomyParams& p, const Utility& u, Weight w,
                 const QuadratureConfig& cfg) {
  const double d = p.delta;
  const SignedLog g1 = slice_expectation(p, u, 2.0 / d, w, cfg);
  const SignedLog g2 = slice_expectation(p, u, 4.0 / d, w, cfg);
  const SignedLog g3 = slice_expectation(p, u, 6.0 / d, w, cfg);
  if (g1.sign == 0 || g1.sign != g2.sign || g2.sign != g3.sign) return {d, false};
  const double l1 = (g2.log_abs - g1.log_abs) * d / 2.0;
  const double l2 = (g3.log_abs - g2.log_abs) * d / 2.0;
  if (!std::isfinite(l1) || !std::isfinite(l2)) return {d, false};
  if (std::abs(l1 - l2) > 1e-6 * (d + std::abs(l1))) return {d, false};
  const double growth = (g3.log_abs - g1.log_abs) * d / 4.0;
  return {d - growth, true};
}

}  // namespace

double integrate(const EconomyParams& p, const Utility& u, Integrand f,
                 const QuadratureConfig& cfg) {
  cfg.validate();
  if (f.tau_power < 0 || f.tau_power > 1) throw DomainError("tau_power must be 0 or 1");
  if (u.is_closed_form_family()) {
    require_convergent(p, u);
  } else {
    check_params(p);
  }

  const double d = p.delta;
  const int k = f.tau_power;
  const RateFit fit = fit_rate(p, u, f.weight, cfg);
  const double r = fit.rate;
  if (!(r > cfg.divergence_guard * d)) {
    std::ostringstream os;
    os.precision(17);
    os << "tau integrand grows: fitted decay rate " << r << " <= guard for "
       << describe_point(p, u);
    throw DivergenceDetected(os.str(), ConvergenceClass::DivergentNegative);
  }

  // Gauss-Laguerre against e^{-r tau}; tau = s / r.
  const auto rule = gauss_laguerre(cfg.n_laguerre);
  const std::size_t n = rule->size();
  std::vector<SignedLog> terms(n), abs_terms(n);
  std::vector<double> node_log_integrand(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double tau = rule->nodes[i] / r;
    SignedLog mag;
    const SignedLog g = slice(p, u, tau, f.weight, cfg, &mag);
    if (std::isnan(g.log_abs) || (g.sign != 0 && !std::isfinite(g.log_abs)))
      throw ToleranceNotMet("non-finite integrand at tau = " + std::to_string(tau) + " for " +
                                describe_point(p, u),
                            std::numeric_limits<double>::quiet_NaN(), 0.0);
    const double log_tau_pow = k == 0 ? 0.0 : std::log(tau);
    node_log_integrand[i] = g.sign == 0 ? -std::numeric_limits<double>::infinity()
                                        : g.log_abs + log_tau_pow - d * tau;
    terms[i] = g.shifted(rule->log_weights[i] + log_tau_pow - (d - r) * tau);
    abs_terms[i] = mag.shifted(rule->log_weights[i] + log_tau_pow - (d - r) * tau);
  }

  // Growth over the last decade of nodes means the tau integral diverges.
  const std::size_t tail_start = n - std::max<std::size_t>(n / 10, 2);
  bool growing = true;
  for (std::size_t i = tail_start + 1; i < n; ++i)
    if (!(node_log_integrand[i] > node_log_integrand[i - 1])) growing = false;
  if (growing) {
    throw DivergenceDetected("tau integrand increases over the last decade of nodes for " +
                                 describe_point(p, u),
                             ConvergenceClass::DivergentNegative);
  }

  const double result = log_sum(terms).value() / r;
  if (!cfg.adaptive_check) return result;

  // Independent check: adaptive Gauss-Kronrod on [0, 50/r] plus the analytic
  // tail of an exponentially decaying integrand.
  const double scale = log_sum(abs_terms).value() / r;
  const double horizon = 50.0 / r;
  auto h = [&](double tau) {
    if (tau <= 0.0) return k == 0 ? slice_expectation(p, u, 0.0, f.weight, cfg).value() : 0.0;
    const SignedLog g = slice_expectation(p, u, tau, f.weight, cfg);
    return g.shifted((k == 0 ? 0.0 : std::log(tau)) - d * tau).value();
  };
  double err = 0.0;
  const double body = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      h, 0.0, horizon, 20, 1e-2 * cfg.rel_tol, &err);
  const double tail = h(horizon) * (1.0 / r + k / (r * r * horizon));
  const double check = body + tail;
  if (std::abs(check - result) > cfg.rel_tol * std::max(std::abs(result), scale)) {
    std::ostringstream os;
    os.precision(17);
    os << "quadrature refinement disagrees: Laguerre " << result << " vs adaptive " << check
       << (fit.matched ? "" : " (unmatched decay rate)") << " for " << describe_point(p, u);
    throw ToleranceNotMet(os.str(), result, check);
  }
  return result;
}

double value(const EconomyParams& p, const Utility& u, const QuadratureConfig& cfg) {
  return integrate(p, u, {Weight::Utility, 0}, cfg);
}

double dV_dsigma(const EconomyParams& p, const Utility& u, const QuadratureConfig& cfg) {
  const double inner = integrate(p, u, {Weight::Curvature, 1}, cfg);
  return p.sigma * inner;
}

double accounting_price(const EconomyParams& p, const Utility& u, const QuadratureConfig& cfg) {
  return integrate(p, u, {Weight::Marginal, 0}, cfg) / p.k0;
}

double second_derivative(const EconomyParams& p, const Utility& u, const QuadratureConfig& cfg) {
  return integrate(p, u, {Weight::Curvature, 0}, cfg) / (p.k0 * p.k0);
}

double ito_term(const EconomyParams& p, const Utility& u, const QuadratureConfig& cfg) {
  return 0.5 * p.sigma * p.sigma * integrate(p, u, {Weight::Curvature, 0}, cfg);
}

double price_term(const EconomyParams& p, const Utility& u, const QuadratureConfig& cfg) {
  return (p.mu - p.nu) * integrate(p, u, {Weight::Marginal, 0}, cfg);
}

double dV_dt(const EconomyParams& p, const Utility& u, const QuadratureConfig& cfg) {
  return integrate(p, u, {Weight::Drift, 0}, cfg);
}

double dV_dnu(const EconomyParams& p, const Utility& u, const QuadratureConfig& cfg) {
  const double level = integrate(p, u, {Weight::Marginal, 0}, cfg);
  const double lagged = integrate(p, u, {Weight::Marginal, 1}, cfg);
  return level / p.nu - lagged;
}

double dp_dsigma(const EconomyParams& p, const Utility& u, const QuadratureConfig& cfg) {
  return p.sigma / p.k0 * integrate(p, u, {Weight::PriceCurvature, 1}, cfg);
}

ValueReport report(const EconomyParams& p, const Utility& u, const QuadratureConfig& cfg) {
  ValueReport r;
  r.value = value(p, u, cfg);
  const double marginal = integrate(p, u, {Weight::Marginal, 0}, cfg);
  const double curvature = integrate(p, u, {Weight::Curvature, 0}, cfg);
  r.accounting_price = marginal / p.k0;
  r.second_derivative = curvature / (p.k0 * p.k0);
  r.price_term = (p.mu - p.nu) * marginal;
  r.ito_term = 0.5 * p.sigma * p.sigma * curvature;
  r.dV_dt = r.price_term + r.ito_term;
  r.dV_dsigma = dV_dsigma(p, u, cfg);
  return r;
}

double ito_expansion(double dVdt_partial, double dVdk, double d2Vdk2, double a, double b) {
  return dVdt_partial + a * dVdk + 0.5 * b * b * d2Vdk2;
}

}  // namespace volwealth::quadrature
