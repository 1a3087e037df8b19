#pragma once

#include "volwealth/econ.hpp"
#include "volwealth/signed_log.hpp"

// Numerical evaluation of the value function and its derivatives as
// Gaussian double integrals,
//
//   V = int_0^inf dtau e^{-delta tau} E_z[ u(C(tau, z)) ],
//   C(tau, z) = nu k0 exp((mu - nu - sigma^2/2) tau + sigma sqrt(tau) z),
//
// for any utility exposing scaled derivatives.
namespace volwealth::quadrature {

struct QuadratureConfig {
  int n_hermite = 64;
  int n_laguerre = 128;
  double rel_tol = 1e-8;
  /// Abort with DivergenceDetected once the fitted tau-decay rate falls
  /// below divergence_guard * delta.
  double divergence_guard = 1e-14;
  /// Run the independent adaptive Gauss-Kronrod pass and raise
  /// ToleranceNotMet on disagreement.
  bool adaptive_check = true;

  /// Throws DomainError unless node counts >= 8 and rel_tol in (0, 1e-2].
  void validate() const;
};

/// Integrand weights w(C); each is a combination of scaled derivatives.
enum class Weight {
  Utility,          // u(C)
  Marginal,         // u'(C) C
  Curvature,        // u''(C) C^2
  PriceCurvature,   // C^2 [2 u''(C) + C u'''(C)]
  Drift,            // (mu - nu) u'(C) C + (sigma^2/2) u''(C) C^2
};

/// The integrand tau^tau_power e^{-delta tau} w(C(tau, z)).
struct Integrand {
  Weight weight = Weight::Utility;
  int tau_power = 0;  // 0 or 1
};

/// C(tau, z) for the given economy.
double consumption(const EconomyParams& p, double tau, double z);

/// E_z[w(C(tau, z))] at one tau slice, in sign/log form.
SignedLog slice_expectation(const EconomyParams& p, const Utility& u, double tau, Weight w,
                            const QuadratureConfig& cfg = {});

/// int_0^inf dtau tau^k e^{-delta tau} E_z[w(C)].
double integrate(const EconomyParams& p, const Utility& u, Integrand f,
                 const QuadratureConfig& cfg = {});

double value(const EconomyParams& p, const Utility& u, const QuadratureConfig& cfg = {});
/// sigma * int tau e^{-delta tau} E[u''(C) C^2].
double dV_dsigma(const EconomyParams& p, const Utility& u, const QuadratureConfig& cfg = {});
/// (1/k0) int e^{-delta tau} E[u'(C) C].
double accounting_price(const EconomyParams& p, const Utility& u,
                        const QuadratureConfig& cfg = {});
/// k0^-2 int e^{-delta tau} E[u''(C) C^2].
double second_derivative(const EconomyParams& p, const Utility& u,
                         const QuadratureConfig& cfg = {});
/// (sigma^2/2) k0^2 d2V/dk0^2.
double ito_term(const EconomyParams& p, const Utility& u, const QuadratureConfig& cfg = {});
/// (mu - nu) k0 p.
double price_term(const EconomyParams& p, const Utility& u, const QuadratureConfig& cfg = {});
/// int e^{-delta tau} E[(mu - nu) u'C + (sigma^2/2) u''C^2], as one integrand.
double dV_dt(const EconomyParams& p, const Utility& u, const QuadratureConfig& cfg = {});
/// int e^{-delta tau} E[u'(C) C (1/nu - tau)].
double dV_dnu(const EconomyParams& p, const Utility& u, const QuadratureConfig& cfg = {});
/// (sigma/k0) int tau e^{-delta tau} E[C^2 (2u'' + C u''')].
double dp_dsigma(const EconomyParams& p, const Utility& u, const QuadratureConfig& cfg = {});

/// All report fields in one call.
ValueReport report(const EconomyParams& p, const Utility& u, const QuadratureConfig& cfg = {});

/// dV/dt = dV/dt|_partial + a dV/dk + (b^2/2) d2V/dk2 for general drift a
/// and diffusion b (the last term is the Ito correction).
double ito_expansion(double dVdt_partial, double dVdk, double d2Vdk2, double a, double b);

}  // namespace volwealth::quadrature
