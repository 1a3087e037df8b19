#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "volwealth/econ.hpp"
#include "volwealth/monte_carlo.hpp"
#include "volwealth/quadrature.hpp"

namespace volwealth::cli {

/// Malformed configuration (exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BackendSet { Closed, Quad, Mc, All };

struct Sweep {
  std::string param;  // sigma | nu | delta | mu
  double from = 0.0;
  double to = 0.0;
  int steps = 2;

  double at(int i) const;
};

/// A fully resolved scenario: defaults, then the config file, then flags.
struct Scenario {
  EconomyParams economy{0.05, 0.1, 0.02, 0.03, 1.0};
  std::string utility = "power_neg";  // power_neg | power_pos | log
  double gamma = 1.0;
  double beta = 0.5;
  std::optional<double> depreciation;
  BackendSet backend = BackendSet::Closed;
  bool nu_star = false;
  quadrature::QuadratureConfig quad{};
  monte_carlo::McConfig mc{};
  std::optional<Sweep> sweep;

  Utility make_utility() const;
  /// Economy and utility after folding in depreciation.
  DepreciatedEconomy effective(const EconomyParams& p) const;
  /// Flat key/value listing of every setting, in canonical key order.
  std::map<std::string, std::string> to_map() const;
};

/// Apply one key=value setting. Throws ConfigError on unknown keys or
/// unparsable values.
void set_key(Scenario& s, const std::string& key, const std::string& value);

/// Read a key=value file ('#' comments) or a flat JSON object.
void load_file(Scenario& s, const std::string& path);

Sweep parse_sweep(const std::string& text);
BackendSet parse_backend(const std::string& text);
const char* to_string(BackendSet b) noexcept;

/// Check cross-field invariants (parameter domains, sweep range).
void check(const Scenario& s);

}  // namespace volwealth::cli
