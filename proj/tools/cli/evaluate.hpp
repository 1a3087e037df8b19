#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scenario.hpp"

namespace volwealth::cli {

/// One backend's numbers at one point.
struct BackendRow {
  std::string backend;  // closed | quad | mc
  ValueReport report;
  std::optional<monte_carlo::McReport> mc;
};

struct PointResult {
  EconomyParams params;  // after depreciation
  Validation validation;
  std::vector<BackendRow> rows;
  std::optional<double> nu_star;
  /// Why nu* is missing when it was requested.
  std::string nu_star_note;
  /// Set when a backend refused on divergence grounds.
  std::optional<std::string> divergence;
  /// Max pairwise relative difference of V and p across rows.
  std::optional<double> disagreement;
};

std::vector<std::string> backends_of(BackendSet b);

/// Evaluate every requested backend at `raw` (before depreciation).
PointResult evaluate_point(const Scenario& s, const EconomyParams& raw, bool want_nu_star);

/// |a - b| / max(|a|, |b|); pairs both below `floor` in magnitude count as equal.
double relative_difference(double a, double b, double floor = 0.0);

}  // namespace volwealth::cli
