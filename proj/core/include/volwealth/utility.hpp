#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "volwealth/signed_log.hpp"

namespace volwealth {

/// u(c) and its first three derivatives at one consumption level.
struct UtilityDerivs {
  double u = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
};

/// Elasticity-scaled derivatives: u, u'(c)c, u''(c)c^2, u'''(c)c^3.
///
/// Every integrand of the value function is a combination of these, and for
/// constant-elasticity families each one is a pure power of c, which is what
/// lets the quadrature work entirely in the log domain.
struct ScaledDerivs {
  double u = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
};

using ScaledLogDerivs = std::array<SignedLog, 4>;

enum class UtilityFamily { PowerNeg, PowerPos, Log, Custom };

/// u(c) = -c^-gamma, gamma > 0.
struct PowerNegUtility {
  double gamma;
};
/// u(c) = c^beta, 0 < beta < 1.
struct PowerPosUtility {
  double beta;
};
/// u(c) = ln c.
struct LogUtility {};
/// User-supplied concave utility; the callable returns all four values at c.
struct CustomUtility {
  std::string name;
  std::shared_ptr<const std::function<UtilityDerivs(double)>> derivs;
};

/// A utility function u with analytic derivatives up to third order,
/// optionally composed with a consumption rescaling x -> u(scale * x).
///
/// Immutable value type; cheap to copy.
class Utility {
 public:
  using Kind = std::variant<PowerNegUtility, PowerPosUtility, LogUtility, CustomUtility>;

  static Utility power_neg(double gamma);
  static Utility power_pos(double beta);
  static Utility log();
  static Utility custom(std::string name, std::function<UtilityDerivs(double)> derivs);

  UtilityFamily family() const noexcept;
  const Kind& kind() const noexcept { return kind_; }
  bool is_closed_form_family() const noexcept { return family() != UtilityFamily::Custom; }

  /// Exponent q such that u is proportional to c^q (power families only).
  std::optional<double> power_exponent() const noexcept;

  /// Consumption multiplier applied before evaluation (1 unless rescaled).
  double scale() const noexcept { return std::exp(log_scale_); }
  double log_scale() const noexcept { return log_scale_; }

  /// Composition x -> u(factor * x); derivatives follow by the chain rule.
  Utility rescaled(double factor) const;

  /// u, u', u'', u''' at c > 0. Throws DomainError for c <= 0.
  UtilityDerivs derivs(double c) const;
  double operator()(double c) const { return derivs(c).u; }

  /// Scaled derivatives at c = exp(log_c).
  ScaledDerivs scaled(double log_c) const;
  /// Same as scaled() but in sign/log-magnitude form; never overflows for
  /// the closed-form families.
  ScaledLogDerivs scaled_log(double log_c) const;

  std::string describe() const;

 private:
  explicit Utility(Kind kind) : kind_(std::move(kind)) {}

  Kind kind_;
  double log_scale_ = 0.0;
};

}  // namespace volwealth
