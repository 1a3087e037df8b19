#include "verify.hpp"

#include <cmath>
#include <sstream>

#include "volwealth/closed_form.hpp"
#include "volwealth/policy.hpp"

namespace volwealth::cli {

namespace {

using quadrature::QuadratureConfig;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

Check within(std::string name, double got, double want, double tol, const std::string& what) {
  Check c;
  c.name = std::move(name);
  c.residual = std::abs(got - want);
  c.tolerance = tol;
  c.passed = *c.residual <= tol;
  c.detail = what + ": got " + fmt(got) + ", expected " + fmt(want);
  return c;
}

Check rel_check(std::string name, double got, double want, double rel, double floor,
                const std::string& what) {
  return within(std::move(name), got, want, rel * std::max(std::abs(want), floor), what);
}

// Central differences of quadrature results; the step is mirrored at 0 for
// sigma because everything depends on sigma^2.
template <class F>
double central(const EconomyParams& p, double EconomyParams::*field, double h, F&& f) {
  EconomyParams up = p, down = p;
  up.*field += h;
  down.*field -= h;
  if (field == &EconomyParams::sigma) down.sigma = std::abs(down.sigma);
  return (f(up) - f(down)) / (2.0 * h);
}

}  // namespace

std::vector<Check> verify_point(const Scenario& s) {
  const DepreciatedEconomy eff = s.effective(s.economy);
  const EconomyParams& p = eff.params;
  const Utility& u = eff.utility;
  const Validation val = validate(p, u);
  const QuadratureConfig& qc = s.quad;
  const bool near = val.near_boundary;
  const double quad_rel = near ? 1e-3 : 1e-6;

  std::vector<Check> out;
  const auto cf = closed_form::evaluate(p, u).report;
  const auto q = quadrature::report(p, u, qc);
  const double scale = std::abs(cf.value) + p.k0 * std::abs(cf.accounting_price);
  const double floor = 1e-13 * scale;
  const std::string tag = near ? " (near boundary, widened)" : "";

  out.push_back(rel_check("quad_vs_closed.V", q.value, cf.value, quad_rel, floor, "V" + tag));
  out.push_back(rel_check("quad_vs_closed.p", q.accounting_price, cf.accounting_price, quad_rel,
                          floor, "p" + tag));
  out.push_back(rel_check("quad_vs_closed.dV_dt", q.dV_dt, cf.dV_dt, quad_rel, floor * p.delta,
                          "dV/dt" + tag));
  out.push_back(rel_check("quad_vs_closed.dV_dsigma", q.dV_dsigma, cf.dV_dsigma, quad_rel, floor,
                          "dV/dsigma" + tag));

  std::optional<monte_carlo::McReport> mc;
  try {
    mc = monte_carlo::estimate_all(p, u, s.mc);
  } catch (const DivergenceSuspected& e) {
    Check c;
    c.name = "mc.batch_means";
    c.passed = near;
    c.detail = near ? std::string("Monte Carlo refused next to the divergence boundary: ") + e.what()
                    : std::string(e.what());
    out.push_back(c);
  }
  if (mc) {
    auto mc_check = [&](const char* name, const monte_carlo::EstimateWithError& e, double want) {
      out.push_back(within(name, e.mean, want, e.tolerance(3.0),
                           std::string(name + 13) + " (3 SE + tail + rule bias)"));
    };
    mc_check("mc_vs_closed.V", mc->value, cf.value);
    mc_check("mc_vs_closed.p", mc->price, cf.accounting_price);
    mc_check("mc_vs_closed.price_term", mc->price_term, cf.price_term);
    mc_check("mc_vs_closed.ito_term", mc->ito_term, cf.ito_term);
  }

  // Signs (Propositions 1 and 2).
  {
    Check c;
    c.name = "sign.dV_dsigma";
    double worst = std::max(cf.dV_dsigma, q.dV_dsigma);
    if (mc) worst = std::max(worst, mc->dV_dsigma.mean);
    c.residual = worst;
    c.passed = p.sigma > 0.0 ? worst < 0.0 : worst == 0.0;
    c.detail = p.sigma > 0.0 ? "dV/dsigma < 0 for every backend" : "dV/dsigma = 0 at sigma = 0";
    out.push_back(c);
  }
  {
    Check c;
    c.name = "sign.ito_term";
    double worst = std::max(cf.ito_term, q.ito_term);
    if (mc) worst = std::max(worst, mc->ito_term.mean);
    c.residual = worst;
    c.passed = p.sigma > 0.0 ? worst < 0.0 : worst == 0.0;
    c.detail = p.sigma > 0.0 ? "Ito term < 0 for every backend" : "Ito term = 0 at sigma = 0";
    out.push_back(c);
  }

  const double direct = quadrature::dV_dt(p, u, qc);
  out.push_back(rel_check("decomposition", direct, q.price_term + q.ito_term, 1e-8,
                          floor * p.delta, "direct dV/dt vs price_term + ito_term"));
  if (p.sigma > 0.0 && p.mu > p.nu) {
    Check c;
    c.name = "overestimation";
    c.residual = q.price_term - q.dV_dt;
    c.passed = q.price_term > q.dV_dt;
    c.detail = "price_term > dV/dt when sigma > 0 and mu > nu";
    out.push_back(c);
  }

  auto V = [&](const EconomyParams& e) { return quadrature::value(e, u, qc); };
  auto P = [&](const EconomyParams& e) { return quadrature::accounting_price(e, u, qc); };
  {
    const double h = std::max(1e-4 * p.sigma, 1e-6);
    out.push_back(rel_check("fd.dV_dsigma", q.dV_dsigma, central(p, &EconomyParams::sigma, h, V),
                            near ? 1e-2 : 1e-4, floor, "dV/dsigma vs central differences of V"));
  }
  {
    const double h = 1e-5 * p.k0;
    out.push_back(rel_check("fd.accounting_price", q.accounting_price,
                            central(p, &EconomyParams::k0, h, V), 1e-4, floor / p.k0,
                            "p vs central differences of V in k0"));
  }
  {
    const double h = 1e-3 * p.k0;
    EconomyParams up = p, down = p;
    up.k0 += h;
    down.k0 -= h;
    const double fd = (V(up) - 2.0 * q.value + V(down)) / (h * h);
    out.push_back(rel_check("fd.second_derivative", q.second_derivative, fd, 1e-4,
                            floor / (p.k0 * p.k0), "d2V/dk0^2 vs second differences of V"));
  }
  if (!s.depreciation || *s.depreciation == 0.0) {
    const double h = std::min(1e-5, 1e-2 * p.nu);
    out.push_back(rel_check("fd.dV_dnu", quadrature::dV_dnu(p, u, qc),
                            central(p, &EconomyParams::nu, h, V), 1e-4, floor / p.nu,
                            "dV/dnu vs central differences of V"));
  }
  {
    Check c;
    c.name = "sign.dp_dsigma";
    const double h = std::max(1e-4 * p.sigma, 1e-6);
    const double fd = central(p, &EconomyParams::sigma, h, P);
    const double integral = quadrature::dp_dsigma(p, u, qc);
    c.residual = fd;
    const auto fam = u.family();
    if (p.sigma == 0.0 || fam == UtilityFamily::Log) {
      c.passed = std::abs(fd) < 1e-10;
      c.detail = "dp/dsigma vanishes";
    } else {
      const bool want_positive = fam == UtilityFamily::PowerNeg;
      c.passed = (fd > 0.0) == want_positive && (integral > 0.0) == want_positive;
      c.detail = std::string("dp/dsigma ") + (want_positive ? "> 0" : "< 0") +
                 " by finite differences and by the tau C^2 (2u'' + C u''') integral";
    }
    out.push_back(c);
  }

  if (!s.depreciation || *s.depreciation == 0.0) {
    policy::SolverConfig sc;
    sc.quadrature = qc;
    try {
      const auto closed = policy::optimal_nu(p, u, policy::Backend::ClosedForm, sc);
      const auto solved = policy::optimal_nu(p, u, policy::Backend::Quadrature, sc);
      out.push_back(rel_check("policy.nu_star", solved.nu_star, closed.nu_star, 1e-6, 0.0,
                              "fixed-point nu* vs closed form"));
      const double resid = policy::nu_star_price_identity(p, u, policy::Backend::Quadrature, sc);
      out.push_back(within("policy.price_identity", resid, 0.0, 1e-4 * solved.nu_star,
                           "nu* + 1/(d ln p/d delta)"));
      EconomyParams at = p;
      at.nu = solved.nu_star;
      out.push_back(within("policy.envelope", quadrature::dV_dnu(at, u, qc), 0.0,
                           1e-8 * std::abs(quadrature::value(at, u, qc)), "dV/dnu at nu*"));
      Check c;
      c.name = "policy.dnu_dsigma_sign";
      c.residual = solved.dnu_dsigma;
      const auto fam = u.family();
      if (p.sigma == 0.0 || fam == UtilityFamily::Log) {
        c.passed = solved.mitigation == policy::Mitigation::Neutral;
        c.detail = "nu* does not move with sigma";
      } else {
        const auto want = fam == UtilityFamily::PowerNeg ? policy::Mitigation::Mitigates
                                                         : policy::Mitigation::Accentuates;
        c.passed = solved.mitigation == want && closed.mitigation == want;
        c.detail = std::string("policy adjustment ") + policy::to_string(want);
      }
      out.push_back(c);
    } catch (const NoInteriorOptimum& e) {
      Check c;
      c.name = "policy.nu_star";
      c.passed = true;
      c.detail = std::string("skipped: ") + e.what();
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace volwealth::cli
