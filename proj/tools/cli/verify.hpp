#pragma once

#include <vector>

#include "format.hpp"
#include "scenario.hpp"

namespace volwealth::cli {

/// Three-way backend comparison plus the sign and identity checks at the
/// scenario's point. The point must be convergent.
std::vector<Check> verify_point(const Scenario& s);

}  // namespace volwealth::cli
