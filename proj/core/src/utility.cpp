#include "volwealth/utility.hpp"

#include <cmath>
#include <sstream>

#include "volwealth/errors.hpp"

namespace volwealth {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Coefficients a_k with c^k u^(k)(c) = a_k c^q for u = sign * c^q.
struct PowerLaw {
  double q;
  std::array<double, 4> coef;
};

PowerLaw power_law(const Utility::Kind& kind) {
  if (const auto* n = std::get_if<PowerNegUtility>(&kind)) {
    const double g = n->gamma;
    return {-g, {-1.0, g, -g * (g + 1.0), g * (g + 1.0) * (g + 2.0)}};
  }
  const double b = std::get<PowerPosUtility>(kind).beta;
  return {b, {1.0, b, b * (b - 1.0), b * (b - 1.0) * (b - 2.0)}};
}

}  // namespace

Utility Utility::power_neg(double gamma) {
  if (!std::isfinite(gamma) || gamma <= 0.0)
    throw DomainError("power-negative utility requires gamma > 0");
  return Utility(PowerNegUtility{gamma});
}

Utility Utility::power_pos(double beta) {
  if (!std::isfinite(beta) || beta <= 0.0 || beta >= 1.0)
    throw DomainError("power-positive utility requires 0 < beta < 1 (concavity)");
  return Utility(PowerPosUtility{beta});
}

Utility Utility::log() { return Utility(LogUtility{}); }

Utility Utility::custom(std::string name, std::function<UtilityDerivs(double)> derivs) {
  if (!derivs) throw DomainError("custom utility requires a derivative callable");
  return Utility(CustomUtility{
      std::move(name),
      std::make_shared<const std::function<UtilityDerivs(double)>>(std::move(derivs))});
}

UtilityFamily Utility::family() const noexcept {
  return std::visit(overloaded{
                        [](const PowerNegUtility&) { return UtilityFamily::PowerNeg; },
                        [](const PowerPosUtility&) { return UtilityFamily::PowerPos; },
                        [](const LogUtility&) { return UtilityFamily::Log; },
                        [](const CustomUtility&) { return UtilityFamily::Custom; },
                    },
                    kind_);
}

std::optional<double> Utility::power_exponent() const noexcept {
  if (const auto* n = std::get_if<PowerNegUtility>(&kind_)) return -n->gamma;
  if (const auto* p = std::get_if<PowerPosUtility>(&kind_)) return p->beta;
  return std::nullopt;
}

Utility Utility::rescaled(double factor) const {
  if (!std::isfinite(factor) || factor <= 0.0)
    throw DomainError("consumption rescaling factor must be positive and finite");
  Utility out = *this;
  out.log_scale_ += std::log(factor);
  return out;
}

UtilityDerivs Utility::derivs(double c) const {
  if (!(c > 0.0) || !std::isfinite(c))
    throw DomainError("utility evaluated at non-positive consumption");
  const double s = scale();
  const double x = s * c;
  UtilityDerivs d = std::visit(
      overloaded{
          [x](const PowerNegUtility& n) {
            const double g = n.gamma;
            const double p = std::pow(x, -g);
            return UtilityDerivs{-p, g * p / x, -g * (g + 1.0) * p / (x * x),
                                 g * (g + 1.0) * (g + 2.0) * p / (x * x * x)};
          },
          [x](const PowerPosUtility& pp) {
            const double b = pp.beta;
            const double p = std::pow(x, b);
            return UtilityDerivs{p, b * p / x, b * (b - 1.0) * p / (x * x),
                                 b * (b - 1.0) * (b - 2.0) * p / (x * x * x)};
          },
          [x](const LogUtility&) {
            return UtilityDerivs{std::log(x), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)};
          },
          [x](const CustomUtility& cu) { return (*cu.derivs)(x); },
      },
      kind_);
  // Chain rule for u(s c).
  d.d1 *= s;
  d.d2 *= s * s;
  d.d3 *= s * s * s;
  return d;
}

ScaledDerivs Utility::scaled(double log_c) const {
  // c^k d^k/dc^k u(s c) = (s c)^k u^(k)(s c): the scale only shifts log c.
  const double x = log_c + log_scale_;
  switch (family()) {
    case UtilityFamily::PowerNeg:
    case UtilityFamily::PowerPos: {
      const PowerLaw pl = power_law(kind_);
      const double e = std::exp(pl.q * x);
      return {pl.coef[0] * e, pl.coef[1] * e, pl.coef[2] * e, pl.coef[3] * e};
    }
    case UtilityFamily::Log:
      return {x, 1.0, -1.0, 2.0};
    case UtilityFamily::Custom: {
      const double c = std::exp(x);
      const auto d = (*std::get<CustomUtility>(kind_).derivs)(c);
      return {d.u, d.d1 * c, d.d2 * c * c, d.d3 * c * c * c};
    }
  }
  return {};
}

ScaledLogDerivs Utility::scaled_log(double log_c) const {
  const double x = log_c + log_scale_;
  switch (family()) {
    case UtilityFamily::PowerNeg:
    case UtilityFamily::PowerPos: {
      const PowerLaw pl = power_law(kind_);
      const double base = pl.q * x;
      ScaledLogDerivs out;
      for (int k = 0; k < 4; ++k) out[k] = SignedLog::of(pl.coef[k]).shifted(base);
      return out;
    }
    case UtilityFamily::Log:
      return {SignedLog::of(x), SignedLog{1, 0.0}, SignedLog{-1, 0.0},
              SignedLog{1, std::log(2.0)}};
    case UtilityFamily::Custom: {
      const double c = std::exp(x);
      const auto d = (*std::get<CustomUtility>(kind_).derivs)(c);
      // Multiply by c^k in log space so large c does not overflow the product.
      return {SignedLog::of(d.u), SignedLog::of(d.d1).shifted(x),
              SignedLog::of(d.d2).shifted(2.0 * x), SignedLog::of(d.d3).shifted(3.0 * x)};
    }
  }
  return {};
}

std::string Utility::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const PowerNegUtility& n) { os << "power_neg(gamma=" << n.gamma << ")"; },
                 [&](const PowerPosUtility& p) { os << "power_pos(beta=" << p.beta << ")"; },
                 [&](const LogUtility&) { os << "log"; },
                 [&](const CustomUtility& c) { os << "custom(" << c.name << ")"; },
             },
             kind_);
  if (log_scale_ != 0.0) os << " at scale " << scale();
  return os.str();
}

}  // namespace volwealth
