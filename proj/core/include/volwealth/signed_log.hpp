#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace volwealth {

// A real number stored as sign * exp(log_abs). Used wherever an integrand
// factor may overflow on its own while the product stays finite.
struct SignedLog {
  int sign = 0;
  double log_abs = -std::numeric_limits<double>::infinity();

  static SignedLog of(double v) noexcept {
    if (v == 0.0 || std::isnan(v)) return {};
    return {v > 0 ? 1 : -1, std::log(std::abs(v))};
  }
  static SignedLog from_log(int sign, double log_abs) noexcept {
    if (sign == 0) return {};
    return {sign, log_abs};
  }

  bool is_zero() const noexcept { return sign == 0; }
  double value() const noexcept { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

  SignedLog scaled(double factor) const noexcept {
    if (sign == 0 || factor == 0.0) return {};
    return {factor > 0 ? sign : -sign, log_abs + std::log(std::abs(factor))};
  }
  SignedLog shifted(double log_factor) const noexcept {
    if (sign == 0) return {};
    return {sign, log_abs + log_factor};
  }
};

inline SignedLog operator+(SignedLog a, SignedLog b) noexcept {
  if (a.sign == 0) return b;
  if (b.sign == 0) return a;
  if (b.log_abs > a.log_abs) std::swap(a, b);
  const double r = std::exp(b.log_abs - a.log_abs);
  const double s = (a.sign == b.sign) ? 1.0 + r : 1.0 - r;
  if (s == 0.0) return {};
  return {a.sign, a.log_abs + std::log(s)};
}

// Sum of terms without intermediate overflow.
inline SignedLog log_sum(std::span<const SignedLog> terms) noexcept {
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms)
    if (t.sign != 0 && t.log_abs > top) top = t.log_abs;
  if (!std::isfinite(top)) {
    if (top > 0) {
      // An infinite term: propagate its sign, or NaN on mixed signs.
      int s = 0;
      for (const auto& t : terms)
        if (t.sign != 0 && t.log_abs == top) s = (s == 0 || s == t.sign) ? t.sign : 2;
      if (s == 2) return {1, std::numeric_limits<double>::quiet_NaN()};
      return {s, top};
    }
    return {};
  }
  double acc = 0.0;
  for (const auto& t : terms)
    if (t.sign != 0) acc += t.sign * std::exp(t.log_abs - top);
  if (acc == 0.0) return {};
  return {acc > 0 ? 1 : -1, top + std::log(std::abs(acc))};
}

}  // namespace volwealth
