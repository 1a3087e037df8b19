#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

// Tabular output: CSV (LF, header row, empty field = undefined) and JSON
// ({scenario, rows[], checks[]}), numbers always at 17 significant digits.
namespace volwealth::cli {

/// %.17g; non-finite values have no faithful textual form and render empty.
std::string format_number(double x);

using Cell = std::variant<std::monostate, double, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Check {
  std::string name;
  bool passed = false;
  std::optional<double> residual;
  std::optional<double> tolerance;
  std::string detail;
};

void write_csv(std::ostream& os, const Table& t);
/// Parse CSV produced by write_csv: numeric-looking fields become doubles,
/// true/false become bools, empty fields become undefined.
Table read_csv(const std::string& text);

void write_json(std::ostream& os, const std::map<std::string, std::string>& scenario,
                const Table& rows, const std::vector<Check>& checks);

}  // namespace volwealth::cli
