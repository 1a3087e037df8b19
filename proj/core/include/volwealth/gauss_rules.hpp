#pragma once

#include <cmath>
#include <memory>
#include <vector>

namespace volwealth {

/// Nodes and weights of an n-point Gaussian rule, weights normalized so that
/// they sum to 1 (the rule computes an expectation against its weight).
/// Log-weights are stored as well: for Gauss-Laguerre the outer weights
/// underflow long before the nodes become irrelevant in the log domain.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> log_weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Probabilists' Gauss-Hermite: E[f(Z)], Z ~ N(0, 1).
std::shared_ptr<const GaussRule> gauss_hermite(int n);

/// Gauss-Laguerre: integral_0^inf e^-s f(s) ds.
std::shared_ptr<const GaussRule> gauss_laguerre(int n);

/// E[f(Z)] computed as E[f(Y + m) exp(-m Y - m^2/2)]: exact for
/// f(z) = poly(z) exp(m z) when the polynomial degree is < 2n.
template <class F>
double gaussian_expectation(const GaussRule& rule, double shift, F&& f) {
  double acc = 0.0;
  for (std::size_t j = 0; j < rule.size(); ++j) {
    const double y = rule.nodes[j];
    acc += rule.weights[j] * f(y + shift) * std::exp(-shift * y - 0.5 * shift * shift);
  }
  return acc;
}

}  // namespace volwealth
