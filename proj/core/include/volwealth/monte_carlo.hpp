#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "volwealth/econ.hpp"
#include "volwealth/philox.hpp"

// Simulation oracle: exact lognormal sampling of capital paths and pathwise
// estimates of V, p and the pieces of dV/dt.
namespace volwealth::monte_carlo {

struct McConfig {
  std::size_t n_paths = 100'000;
  /// Truncation horizon in units of 1/delta.
  double horizon = 40.0;
  /// Intervals of the time grid (even; grid has n_steps + 1 points).
  int n_steps = 2048;
  /// Geometric refinement of the grid toward tau = 0 (0 = uniform).
  double grid_stretch = 4.0;
  std::uint64_t seed = 0x5EEDF00DCAFEULL;
  bool antithetic = true;
  /// Run even when the economy is classified divergent (the batch-mean test
  /// still applies).
  bool diagnostic = false;
  /// Worker threads; 0 = VOLWEALTH_THREADS or hardware default.
  unsigned threads = 0;

  /// n_paths >= 100 (even when antithetic), horizon >= 10, n_steps >= 64 and even.
  void validate() const;
};

struct EstimateWithError {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  /// |integral beyond the horizon| for the closed-form families; +inf when
  /// that tail diverges.
  std::optional<double> tail_bound;
  /// |time-rule error of the expected integrand on [0, horizon]| plus a
  /// summation rounding bound (closed-form families only).
  std::optional<double> rule_bias;

  /// 3 SE + tail_bound + rule_bias: the acceptance band around the truth.
  double tolerance(double n_se = 3.0) const;
};

struct TimeGrid {
  std::vector<double> tau;
  /// Quadrature weights of int_0^T e^{-delta tau} f(tau) dtau (discount included).
  std::vector<double> weight;
};

TimeGrid make_time_grid(const EconomyParams& p, const McConfig& cfg);

/// k(t_i) = k0 exp(v t_i + sigma W(t_i)) sampled exactly on `grid`, which
/// must start at 0 and be strictly increasing.
std::vector<double> sample_path(const EconomyParams& p, std::span<const double> grid,
                                NormalStream& rng);

/// All estimates from one set of paths (common random numbers).
struct McReport {
  EstimateWithError value;
  EstimateWithError price;       // accounting price p
  EstimateWithError price_term;  // (mu - nu) k0 p
  EstimateWithError ito_term;    // (sigma^2/2) k0^2 d2V/dk0^2
  EstimateWithError dV_dt;       // price_term + ito_term, per path
  EstimateWithError dV_dsigma;   // sigma E int tau e^{-delta tau} u''(C) C^2
  std::size_t n_paths = 0;
  /// Batch-mean statistic of the value samples (see batch_mean_test).
  double batch_statistic = 0.0;
};

McReport estimate_all(const EconomyParams& p, const Utility& u, const McConfig& cfg = {});

EstimateWithError estimate_value(const EconomyParams& p, const Utility& u,
                                 const McConfig& cfg = {});
EstimateWithError estimate_price(const EconomyParams& p, const Utility& u,
                                 const McConfig& cfg = {});
/// (price_term, ito_term).
std::pair<EstimateWithError, EstimateWithError> estimate_dV_dt_components(
    const EconomyParams& p, const Utility& u, const McConfig& cfg = {});
EstimateWithError estimate_dV_dsigma(const EconomyParams& p, const Utility& u,
                                     const McConfig& cfg = {});

/// Batch-mean divergence test on per-path samples (64 batches, fewer when
/// a batch would hold under 16 samples).
struct BatchMeanTest {
  bool divergence_suspected = false;
  /// Relative shortfall of the median batch mean against the overall mean,
  /// (|mean| - |median|) / |mean|.
  double statistic = 0.0;
};

BatchMeanTest batch_mean_test(std::span<const double> samples);

/// Deterministic pairwise (tree) summation.
double pairwise_sum(std::span<const double> xs);

}  // namespace volwealth::monte_carlo
