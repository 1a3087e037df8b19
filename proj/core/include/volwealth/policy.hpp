#pragma once

#include "volwealth/econ.hpp"
#include "volwealth/quadrature.hpp"

// The consumption rate that maximizes V, and how V responds to volatility
// once that rate is re-optimized.
namespace volwealth::policy {

enum class Backend { ClosedForm, Quadrature };

/// Sign of the policy response to volatility.
enum class Mitigation {
  Mitigates,    // d nu*/d sigma < 0
  Accentuates,  // d nu*/d sigma > 0
  Neutral,      // |d nu*/d sigma| < 1e-10
};

const char* to_string(Mitigation m) noexcept;
const char* to_string(Backend b) noexcept;

struct PolicyResult {
  double nu_star = 0.0;
  double dnu_dsigma = 0.0;
  /// dV/dsigma along nu*(sigma): partial + dV/dnu * dnu*/dsigma.
  double dV_dsigma_total = 0.0;
  Mitigation mitigation = Mitigation::Neutral;
  /// Fixed-point iterations spent (0 for the closed-form backend).
  int iterations = 0;
  bool used_bisection = false;
};

struct SolverConfig {
  double damping = 0.5;
  int max_iterations = 200;
  /// Relative step size at which the iteration is considered converged.
  double rel_tol = 1e-12;
  quadrature::QuadratureConfig quadrature{};
};

/// Optimal consumption rate; the nu stored in `p` is ignored.
/// Throws NoInteriorOptimum when nu* <= 0 and NonConvergence when neither
/// the fixed point nor the bisection fallback settles.
PolicyResult optimal_nu(const EconomyParams& p, const Utility& u, Backend backend,
                        const SolverConfig& cfg = {});

/// |nu* + 1 / (d ln p / d delta)| evaluated at nu = nu*, with the delta
/// derivative taken by central differences of the accounting price.
double nu_star_price_identity(const EconomyParams& p, const Utility& u, Backend backend,
                              const SolverConfig& cfg = {});

struct TotalSensitivity {
  double partial = 0.0;      // dV/dsigma at fixed nu
  double policy_term = 0.0;  // dV/dnu * dnu*/dsigma
  double total = 0.0;
};

/// All three pieces of dV/dsigma at nu = nu*. The policy term vanishes up to
/// solver accuracy (envelope condition).
TotalSensitivity total_dV_dsigma(const EconomyParams& p, const Utility& u, Backend backend,
                                 const SolverConfig& cfg = {});

}  // namespace volwealth::policy
