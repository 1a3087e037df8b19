#pragma once

#include <iosfwd>
#include <string>

#include "scenario.hpp"

namespace volwealth::cli {

/// Stable exit codes.
enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kDivergence = 2,
  kCheckFailed = 3,
};

enum class Format { Text, Csv, Json };

Format parse_format(const std::string& text);

int cmd_report(const Scenario& s, Format f, std::ostream& out, std::ostream& err);
int cmd_sweep(const Scenario& s, Format f, std::ostream& out, std::ostream& err);
int cmd_verify(const Scenario& s, Format f, std::ostream& out, std::ostream& err);

}  // namespace volwealth::cli
