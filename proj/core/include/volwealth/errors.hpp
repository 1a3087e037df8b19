#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace volwealth {

enum class ConvergenceClass {
  Convergent,
  DivergentNegative,  // V -> -inf, dominated by paths heading to k = 0
  DivergentPositive,  // V -> +inf, dominated by runaway growth
};

const char* to_string(ConvergenceClass c) noexcept;

/// Parameter or argument outside its mathematical domain.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The value integral does not converge for the given economy.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, ConvergenceClass cls,
                  std::optional<double> sigma_c = std::nullopt)
      : std::runtime_error(what), class_(cls), sigma_c_(sigma_c) {}

  ConvergenceClass convergence() const noexcept { return class_; }
  std::optional<double> sigma_c() const noexcept { return sigma_c_; }

 private:
  ConvergenceClass class_;
  std::optional<double> sigma_c_;
};

/// Raised by the quadrature guard when the tau integrand grows.
class DivergenceDetected : public DivergenceError {
 public:
  using DivergenceError::DivergenceError;
};

/// Raised by the Monte Carlo batch-mean test.
class DivergenceSuspected : public DivergenceError {
 public:
  using DivergenceError::DivergenceError;
};

/// The independent refinement pass disagrees with the fixed rule.
class ToleranceNotMet : public std::runtime_error {
 public:
  ToleranceNotMet(const std::string& what, double primary, double check)
      : std::runtime_error(what), primary_(primary), check_(check) {}
  double primary() const noexcept { return primary_; }
  double check() const noexcept { return check_; }

 private:
  double primary_;
  double check_;
};

class NoInteriorOptimum : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace volwealth
