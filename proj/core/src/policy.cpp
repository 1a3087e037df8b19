#include "volwealth/policy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "volwealth/closed_form.hpp"

namespace volwealth::policy {

namespace {

constexpr double kNuFloor = 1e-6;

Mitigation classify(double dnu) {
  if (std::abs(dnu) < 1e-10) return Mitigation::Neutral;
  return dnu < 0.0 ? Mitigation::Mitigates : Mitigation::Accentuates;
}

EconomyParams with_nu(EconomyParams p, double nu) {
  p.nu = nu;
  return p;
}

std::string no_optimum_message(const EconomyParams& p, const Utility& u, double nu_star) {
  std::ostringstream os;
  os.precision(6);
  os << "no interior optimum for " << u.describe() << " (nu* = " << nu_star << " <= 0)";
  if (u.family() == UtilityFamily::PowerNeg) {
    // nu* -> 0 exactly when sigma reaches sigma_c of the economy with nu = 0.
    const double g = std::get<PowerNegUtility>(u.kind()).gamma;
    const double num = 2.0 * (p.delta + g * p.mu) / (g * (1.0 + g));
    os << "; sigma = " << p.sigma << " is at or beyond sigma_c(nu -> 0) = "
       << (num > 0.0 ? std::sqrt(num) : 0.0);
  } else if (u.family() == UtilityFamily::PowerPos) {
    os << "; V is unbounded as nu decreases (delta - beta mu + beta (1 - beta) sigma^2/2 <= 0)";
  }
  return os.str();
}

// Sign of dV/dnu, with divergent economies mapped to the side the optimum
// lies on: V -> -inf means nu is too large.
int dV_dnu_sign(const EconomyParams& p, const Utility& u, const SolverConfig& cfg) {
  try {
    const double d = quadrature::dV_dnu(p, u, cfg.quadrature);
    return d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
  } catch (const DivergenceError& e) {
    if (e.convergence() == ConvergenceClass::DivergentNegative) return -1;
    throw NoInteriorOptimum(no_optimum_message(p, u, 0.0));
  }
}

double fixed_point_map(const EconomyParams& p, const Utility& u, const SolverConfig& cfg) {
  const double num = quadrature::integrate(p, u, {quadrature::Weight::Marginal, 0}, cfg.quadrature);
  const double den = quadrature::integrate(p, u, {quadrature::Weight::Marginal, 1}, cfg.quadrature);
  return num / den;
}

struct Solve {
  double nu;
  int iterations;
  bool bisection;
};

Solve bisect(const EconomyParams& p, const Utility& u, const SolverConfig& cfg, int iterations) {
  double lo = kNuFloor;
  double hi = std::max(p.mu + p.delta, 2.0 * kNuFloor);
  if (dV_dnu_sign(with_nu(p, lo), u, cfg) < 0)
    throw NoInteriorOptimum(no_optimum_message(p, u, 0.0));
  int expansions = 0;
  while (dV_dnu_sign(with_nu(p, hi), u, cfg) > 0) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 40) throw NonConvergence("no sign change of dV/dnu found for " + u.describe());
  }
  for (int i = 0; i < 200 && hi - lo > cfg.rel_tol * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    const int s = dV_dnu_sign(with_nu(p, mid), u, cfg);
    if (s == 0) return {mid, iterations, true};
    (s > 0 ? lo : hi) = mid;
  }
  return {0.5 * (lo + hi), iterations, true};
}

Solve solve_quadrature(const EconomyParams& p, const Utility& u, const SolverConfig& cfg) {
  double nu = std::max(p.delta, kNuFloor);
  int it = 0;
  try {
    for (; it < cfg.max_iterations; ++it) {
      const double target = fixed_point_map(with_nu(p, nu), u, cfg);
      const double next = (1.0 - cfg.damping) * nu + cfg.damping * target;
      if (!std::isfinite(next) || next <= 0.0) break;
      if (std::abs(next - nu) <= cfg.rel_tol * next) return {next, it + 1, false};
      nu = next;
    }
  } catch (const DivergenceError&) {
    // The iterate left the convergent region; fall back to bracketing.
  }
  return bisect(p, u, cfg, it);
}

double solve_nu(const EconomyParams& p, const Utility& u, Backend backend,
                const SolverConfig& cfg, PolicyResult* out) {
  if (backend == Backend::ClosedForm) {
    const double nu = closed_form::nu_star_closed(u, p);
    if (!(nu > 0.0)) throw NoInteriorOptimum(no_optimum_message(p, u, nu));
    if (out) out->iterations = 0;
    return nu;
  }
  const Solve s = solve_quadrature(p, u, cfg);
  if (out) {
    out->iterations = s.iterations;
    out->used_bisection = s.bisection;
  }
  return s.nu;
}

double dnu_dsigma(const EconomyParams& p, const Utility& u, Backend backend,
                  const SolverConfig& cfg) {
  if (backend == Backend::ClosedForm) return closed_form::dnu_star_dsigma_closed(u, p);
  // nu* depends on sigma only through sigma^2, so |sigma - h| mirrors the
  // lower point when sigma < h.
  const double h = std::max(1e-4, 1e-3 * p.sigma);
  EconomyParams up = p, down = p;
  up.sigma = p.sigma + h;
  down.sigma = std::abs(p.sigma - h);
  return (solve_nu(up, u, backend, cfg, nullptr) - solve_nu(down, u, backend, cfg, nullptr)) /
         (up.sigma - (p.sigma - h));
}

double price_at(const EconomyParams& p, const Utility& u, Backend backend,
                const SolverConfig& cfg) {
  if (backend == Backend::ClosedForm) return closed_form::evaluate(p, u).report.accounting_price;
  return quadrature::accounting_price(p, u, cfg.quadrature);
}

}  // namespace

const char* to_string(Mitigation m) noexcept {
  switch (m) {
    case Mitigation::Mitigates: return "mitigates";
    case Mitigation::Accentuates: return "accentuates";
    case Mitigation::Neutral: return "neutral";
  }
  return "?";
}

const char* to_string(Backend b) noexcept {
  return b == Backend::ClosedForm ? "closed" : "quad";
}

PolicyResult optimal_nu(const EconomyParams& p, const Utility& u, Backend backend,
                        const SolverConfig& cfg) {
  check_params(with_nu(p, std::max(p.nu, kNuFloor)));
  if (backend == Backend::ClosedForm && !u.is_closed_form_family())
    throw DomainError("closed-form policy requires power_neg, power_pos or log utility");
  PolicyResult r;
  r.nu_star = solve_nu(p, u, backend, cfg, &r);
  r.dnu_dsigma = dnu_dsigma(p, u, backend, cfg);
  r.mitigation = classify(r.dnu_dsigma);
  const EconomyParams at = with_nu(p, r.nu_star);
  if (backend == Backend::ClosedForm) {
    r.dV_dsigma_total = closed_form::dV_dsigma_closed(u, at) +
                        closed_form::dV_dnu_closed(u, at) * r.dnu_dsigma;
  } else {
    r.dV_dsigma_total = quadrature::dV_dsigma(at, u, cfg.quadrature) +
                        quadrature::dV_dnu(at, u, cfg.quadrature) * r.dnu_dsigma;
  }
  return r;
}

double nu_star_price_identity(const EconomyParams& p, const Utility& u, Backend backend,
                              const SolverConfig& cfg) {
  const double nu = solve_nu(p, u, backend, cfg, nullptr);
  const EconomyParams at = with_nu(p, nu);
  const double h = 1e-4 * p.delta;
  EconomyParams up = at, down = at;
  up.delta += h;
  down.delta -= h;
  const double dlnp = (std::log(std::abs(price_at(up, u, backend, cfg))) -
                       std::log(std::abs(price_at(down, u, backend, cfg)))) /
                      (2.0 * h);
  return std::abs(nu + 1.0 / dlnp);
}

TotalSensitivity total_dV_dsigma(const EconomyParams& p, const Utility& u, Backend backend,
                                 const SolverConfig& cfg) {
  const PolicyResult r = optimal_nu(p, u, backend, cfg);
  const EconomyParams at = with_nu(p, r.nu_star);
  TotalSensitivity t;
  if (backend == Backend::ClosedForm) {
    t.partial = closed_form::dV_dsigma_closed(u, at);
    t.policy_term = closed_form::dV_dnu_closed(u, at) * r.dnu_dsigma;
  } else {
    t.partial = quadrature::dV_dsigma(at, u, cfg.quadrature);
    t.policy_term = quadrature::dV_dnu(at, u, cfg.quadrature) * r.dnu_dsigma;
  }
  t.total = t.partial + t.policy_term;
  return t;
}

}  // namespace volwealth::policy
