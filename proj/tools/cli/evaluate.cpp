#include "evaluate.hpp"

#include <algorithm>
#include <cmath>

#include "volwealth/closed_form.hpp"
#include "volwealth/policy.hpp"

namespace volwealth::cli {

std::vector<std::string> backends_of(BackendSet b) {
  switch (b) {
    case BackendSet::Closed: return {"closed"};
    case BackendSet::Quad: return {"quad"};
    case BackendSet::Mc: return {"mc"};
    case BackendSet::All: return {"closed", "quad", "mc"};
  }
  return {};
}

double relative_difference(double a, double b, double floor) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale <= floor || a == b) return 0.0;
  return std::abs(a - b) / scale;
}

PointResult evaluate_point(const Scenario& s, const EconomyParams& raw, bool want_nu_star) {
  const DepreciatedEconomy eff = s.effective(raw);
  const EconomyParams& p = eff.params;
  const Utility& u = eff.utility;
  check_params(p);

  PointResult r;
  r.params = p;
  r.validation = validate(p, u);
  if (!r.validation.convergent()) {
    try {
      require_convergent(p, u);
    } catch (const DivergenceError& e) {
      r.divergence = e.what();
    }
    return r;
  }

  for (const std::string& b : backends_of(s.backend)) {
    try {
      BackendRow row{b, {}, std::nullopt};
      if (b == "closed") {
        row.report = closed_form::evaluate(p, u).report;
      } else if (b == "quad") {
        row.report = quadrature::report(p, u, s.quad);
      } else {
        const auto m = monte_carlo::estimate_all(p, u, s.mc);
        row.report.value = m.value.mean;
        row.report.accounting_price = m.price.mean;
        row.report.price_term = m.price_term.mean;
        row.report.ito_term = m.ito_term.mean;
        row.report.dV_dt = m.dV_dt.mean;
        row.report.dV_dsigma = m.dV_dsigma.mean;
        row.report.second_derivative = p.sigma > 0.0
            ? m.ito_term.mean / (0.5 * p.sigma * p.sigma * p.k0 * p.k0)
            : std::nan("");
        row.mc = m;
      }
      r.rows.push_back(std::move(row));
    } catch (const DivergenceError& e) {
      r.divergence = e.what();
    }
  }

  if (r.rows.size() > 1) {
    double worst = 0.0;
    const double floor = 1e-12 * p.k0 * std::abs(r.rows.front().report.accounting_price);
    for (std::size_t i = 0; i < r.rows.size(); ++i)
      for (std::size_t j = i + 1; j < r.rows.size(); ++j) {
        const auto& a = r.rows[i].report;
        const auto& b = r.rows[j].report;
        worst = std::max({worst, relative_difference(a.value, b.value, floor),
                          relative_difference(a.accounting_price, b.accounting_price)});
      }
    r.disagreement = worst;
  }

  if (want_nu_star) {
    if (s.depreciation && *s.depreciation > 0.0) {
      r.nu_star_note = "nu* is not reported with depreciation (the utility rescaling depends on nu)";
    } else {
      const auto backend =
          s.backend == BackendSet::Quad ? policy::Backend::Quadrature : policy::Backend::ClosedForm;
      try {
        policy::SolverConfig sc;
        sc.quadrature = s.quad;
        r.nu_star = policy::optimal_nu(p, u, backend, sc).nu_star;
      } catch (const NoInteriorOptimum& e) {
        r.nu_star_note = e.what();
      } catch (const DivergenceError& e) {
        r.nu_star_note = e.what();
      }
    }
  }
  return r;
}

}  // namespace volwealth::cli
