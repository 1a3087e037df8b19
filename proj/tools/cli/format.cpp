#include "format.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace volwealth::cli {

namespace {

std::string csv_field(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) return {};
        else if constexpr (std::is_same_v<T, double>) return format_number(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else {
          if (v.find_first_of(",\"\n") == std::string::npos) return v;
          std::string q = "\"";
          for (char ch : v) {
            if (ch == '"') q += '"';
            q += ch;
          }
          return q + '"';
        }
      },
      c);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

Cell parse_cell(const std::string& s) {
  if (s.empty()) return std::monostate{};
  if (s == "true") return true;
  if (s == "false") return false;
  double x = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, x);
  if (ec == std::errc() && ptr == end && std::isfinite(x)) return x;
  return s;
}

void json_string(std::ostream& os, const std::string& s) {
  os << '"';
  for (char ch : s) {
    switch (ch) {
      case '"': os << "\\\""; break;
      case '\\': os << "\\\\"; break;
      case '\n': os << "\\n"; break;
      case '\t': os << "\\t"; break;
      case '\r': os << "\\r"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          os << buf;
        } else {
          os << ch;
        }
    }
  }
  os << '"';
}

void json_number(std::ostream& os, std::optional<double> x) {
  if (!x || !std::isfinite(*x)) os << "null";
  else os << format_number(*x);
}

void json_cell(std::ostream& os, const Cell& c) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) os << "null";
        else if constexpr (std::is_same_v<T, double>) json_number(os, v);
        else if constexpr (std::is_same_v<T, bool>) os << (v ? "true" : "false");
        else json_string(os, v);
      },
      c);
}

}  // namespace

std::string format_number(double x) {
  if (!std::isfinite(x)) return {};
  if (x == 0.0) return "0";  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    os << (i ? "," : "") << csv_field(t.columns[i]);
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
    os << '\n';
  }
}

Table read_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() && in.eof()) break;
    auto fields = split_csv_line(line);
    if (header) {
      t.columns = std::move(fields);
      header = false;
      continue;
    }
    if (fields.size() != t.columns.size())
      throw std::runtime_error("CSV row has " + std::to_string(fields.size()) +
                               " fields, header has " + std::to_string(t.columns.size()));
    std::vector<Cell> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_cell(f));
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_json(std::ostream& os, const std::map<std::string, std::string>& scenario,
                const Table& rows, const std::vector<Check>& checks) {
  os << "{\n  \"scenario\": {";
  bool first = true;
  for (const auto& [k, v] : scenario) {
    os << (first ? "\n    " : ",\n    ");
    json_string(os, k);
    os << ": ";
    json_string(os, v);
    first = false;
  }
  os << (first ? "}" : "\n  }") << ",\n  \"rows\": [";
  for (std::size_t r = 0; r < rows.rows.size(); ++r) {
    os << (r ? ",\n    {" : "\n    {");
    for (std::size_t i = 0; i < rows.columns.size(); ++i) {
      if (i) os << ", ";
      json_string(os, rows.columns[i]);
      os << ": ";
      json_cell(os, rows.rows[r][i]);
    }
    os << '}';
  }
  os << (rows.rows.empty() ? "]" : "\n  ]") << ",\n  \"checks\": [";
  for (std::size_t c = 0; c < checks.size(); ++c) {
    const Check& ch = checks[c];
    os << (c ? ",\n    {" : "\n    {") << "\"name\": ";
    json_string(os, ch.name);
    os << ", \"status\": " << (ch.passed ? "\"pass\"" : "\"fail\"") << ", \"residual\": ";
    json_number(os, ch.residual);
    os << ", \"tolerance\": ";
    json_number(os, ch.tolerance);
    os << ", \"detail\": ";
    json_string(os, ch.detail);
    os << '}';
  }
  os << (checks.empty() ? "]" : "\n  ]") << "\n}\n";
}

}  // namespace volwealth::cli
