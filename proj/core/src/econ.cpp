#include "volwealth/econ.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace volwealth {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kBoundaryBand = 1e-10;

struct Denominator {
  double value;
  double magnitude;  // sum of absolute values of the terms, for rounding
};

std::optional<Denominator> denominator_terms(const EconomyParams& p, const Utility& u) {
  const double s2 = p.sigma * p.sigma;
  switch (u.family()) {
    case UtilityFamily::PowerNeg: {
      const double g = std::get<PowerNegUtility>(u.kind()).gamma;
      const double noise = g * (1.0 + g) * s2 / 2.0;
      return Denominator{p.delta + g * (p.mu - p.nu) - noise,
                         p.delta + g * (std::abs(p.mu) + p.nu) + noise};
    }
    case UtilityFamily::PowerPos: {
      const double b = std::get<PowerPosUtility>(u.kind()).beta;
      const double noise = b * (1.0 - b) * s2 / 2.0;
      return Denominator{p.delta - b * (p.mu - p.nu) + noise,
                         p.delta + b * (std::abs(p.mu) + p.nu) + noise};
    }
    default:
      return std::nullopt;
  }
}

}  // namespace

const char* to_string(ConvergenceClass c) noexcept {
  switch (c) {
    case ConvergenceClass::Convergent: return "convergent";
    case ConvergenceClass::DivergentNegative: return "divergent_negative";
    case ConvergenceClass::DivergentPositive: return "divergent_positive";
  }
  return "unknown";
}

void check_params(const EconomyParams& p) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(p.mu) || !finite(p.sigma) || !finite(p.nu) || !finite(p.delta) || !finite(p.k0))
    throw DomainError("economy parameters must be finite");
  if (p.sigma < 0.0) throw DomainError("sigma must be >= 0");
  if (p.nu <= 0.0) throw DomainError("nu (consumption rate) must be > 0");
  if (p.delta <= 0.0) throw DomainError("delta (discount rate) must be > 0");
  if (p.k0 <= 0.0) throw DomainError("k0 (initial capital) must be > 0");
}

std::optional<double> closed_form_denominator(const EconomyParams& p, const Utility& u) {
  if (auto d = denominator_terms(p, u)) return d->value;
  return std::nullopt;
}

double critical_sigma(const EconomyParams& p, double gamma) {
  const double num = 2.0 * (p.delta + gamma * (p.mu - p.nu));
  if (num <= 0.0) return 0.0;
  return std::sqrt(num / (gamma * (1.0 + gamma)));
}

Validation validate(const EconomyParams& p, const Utility& u) {
  check_params(p);
  Validation v;
  if (u.family() == UtilityFamily::PowerNeg)
    v.sigma_c = critical_sigma(p, std::get<PowerNegUtility>(u.kind()).gamma);

  const auto d = denominator_terms(p, u);
  if (!d) return v;  // log and custom utilities: no closed-form condition
  v.denominator = d->value;
  if (d->value <= 8.0 * kEps * d->magnitude) {
    v.convergence = u.family() == UtilityFamily::PowerNeg ? ConvergenceClass::DivergentNegative
                                                         : ConvergenceClass::DivergentPositive;
    return v;
  }
  v.near_boundary = std::abs(d->value) < kBoundaryBand * (p.delta + std::abs(p.mu) + p.nu);
  return v;
}

void require_convergent(const EconomyParams& p, const Utility& u) {
  const Validation v = validate(p, u);
  if (v.convergent()) return;
  std::ostringstream os;
  os.precision(17);
  if (v.convergence == ConvergenceClass::DivergentNegative) {
    os << "value integral diverges to -infinity (bankruptcy-dominated): sigma = " << p.sigma
       << " >= sigma_c = " << v.sigma_c.value_or(0.0);
  } else {
    os << "value integral diverges to +infinity (growth-dominated): denominator "
       << v.denominator.value_or(0.0) << " <= 0";
  }
  throw DivergenceError(os.str(), v.convergence, v.sigma_c);
}

DepreciatedEconomy apply_depreciation(const EconomyParams& p, const Utility& u, double rate) {
  check_params(p);
  if (!std::isfinite(rate) || rate < 0.0) throw DomainError("depreciation rate must be >= 0");
  if (rate == 0.0) return {p, u};
  EconomyParams q = p;
  q.nu = p.nu + rate;
  return {q, u.rescaled(1.0 + rate / p.nu)};
}

std::string describe(const EconomyParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << "mu=" << p.mu << " sigma=" << p.sigma << " nu=" << p.nu << " delta=" << p.delta
     << " k0=" << p.k0;
  return os.str();
}

}  // namespace volwealth
