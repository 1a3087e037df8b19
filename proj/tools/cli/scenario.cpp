#include "scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "format.hpp"

namespace volwealth::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty())
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  int base = 10;
  std::string digits = v;
  if (v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X')) {
    base = 16;
    digits = v.substr(2);
  }
  const char* end = digits.data() + digits.size();
  auto [ptr, ec] = std::from_chars(digits.data(), end, out, base);
  if (ec != std::errc() || ptr != end || digits.empty())
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + v + "'");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  const std::uint64_t u = to_u64(key, v);
  if (u > 1'000'000'000ULL) throw ConfigError("'" + key + "' is out of range");
  return static_cast<int>(u);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + v + "'");
}

using Setter = std::function<void(Scenario&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"mu", [](Scenario& s, auto& k, auto& v) { s.economy.mu = to_double(k, v); }},
      {"sigma", [](Scenario& s, auto& k, auto& v) { s.economy.sigma = to_double(k, v); }},
      {"nu", [](Scenario& s, auto& k, auto& v) { s.economy.nu = to_double(k, v); }},
      {"delta", [](Scenario& s, auto& k, auto& v) { s.economy.delta = to_double(k, v); }},
      {"k0", [](Scenario& s, auto& k, auto& v) { s.economy.k0 = to_double(k, v); }},
      {"utility",
       [](Scenario& s, auto&, auto& v) {
         if (v != "power_neg" && v != "power_pos" && v != "log")
           throw ConfigError("utility must be power_neg, power_pos or log, got '" + v + "'");
         s.utility = v;
       }},
      {"gamma", [](Scenario& s, auto& k, auto& v) { s.gamma = to_double(k, v); }},
      {"beta", [](Scenario& s, auto& k, auto& v) { s.beta = to_double(k, v); }},
      {"depreciation",
       [](Scenario& s, auto& k, auto& v) {
         if (v.empty()) s.depreciation.reset();
         else s.depreciation = to_double(k, v);
       }},
      {"backend", [](Scenario& s, auto&, auto& v) { s.backend = parse_backend(v); }},
      {"nu_star", [](Scenario& s, auto& k, auto& v) { s.nu_star = to_bool(k, v); }},
      {"sweep",
       [](Scenario& s, auto&, auto& v) {
         if (v.empty()) s.sweep.reset();
         else s.sweep = parse_sweep(v);
       }},
      {"quad.n_hermite", [](Scenario& s, auto& k, auto& v) { s.quad.n_hermite = to_int(k, v); }},
      {"quad.n_laguerre", [](Scenario& s, auto& k, auto& v) { s.quad.n_laguerre = to_int(k, v); }},
      {"quad.rel_tol", [](Scenario& s, auto& k, auto& v) { s.quad.rel_tol = to_double(k, v); }},
      {"mc.paths", [](Scenario& s, auto& k, auto& v) { s.mc.n_paths = to_u64(k, v); }},
      {"mc.horizon", [](Scenario& s, auto& k, auto& v) { s.mc.horizon = to_double(k, v); }},
      {"mc.steps", [](Scenario& s, auto& k, auto& v) { s.mc.n_steps = to_int(k, v); }},
      {"mc.stretch", [](Scenario& s, auto& k, auto& v) { s.mc.grid_stretch = to_double(k, v); }},
      {"mc.seed", [](Scenario& s, auto& k, auto& v) { s.mc.seed = to_u64(k, v); }},
      {"mc.antithetic", [](Scenario& s, auto& k, auto& v) { s.mc.antithetic = to_bool(k, v); }},
      {"mc.diagnostic", [](Scenario& s, auto& k, auto& v) { s.mc.diagnostic = to_bool(k, v); }},
      {"mc.threads",
       [](Scenario& s, auto& k, auto& v) { s.mc.threads = static_cast<unsigned>(to_int(k, v)); }},
  };
  return table;
}

}  // namespace

double Sweep::at(int i) const {
  if (i == steps - 1) return to;
  return from + (to - from) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

Utility Scenario::make_utility() const {
  if (utility == "power_neg") return Utility::power_neg(gamma);
  if (utility == "power_pos") return Utility::power_pos(beta);
  return Utility::log();
}

DepreciatedEconomy Scenario::effective(const EconomyParams& p) const {
  return apply_depreciation(p, make_utility(), depreciation.value_or(0.0));
}

std::map<std::string, std::string> Scenario::to_map() const {
  std::map<std::string, std::string> m;
  m["mu"] = format_number(economy.mu);
  m["sigma"] = format_number(economy.sigma);
  m["nu"] = format_number(economy.nu);
  m["delta"] = format_number(economy.delta);
  m["k0"] = format_number(economy.k0);
  m["utility"] = utility;
  if (utility == "power_neg") m["gamma"] = format_number(gamma);
  if (utility == "power_pos") m["beta"] = format_number(beta);
  if (depreciation) m["depreciation"] = format_number(*depreciation);
  m["backend"] = to_string(backend);
  m["nu_star"] = nu_star ? "true" : "false";
  if (sweep) {
    std::ostringstream os;
    os << sweep->param << ':' << format_number(sweep->from) << ':' << format_number(sweep->to)
       << ':' << sweep->steps;
    m["sweep"] = os.str();
  }
  m["quad.n_hermite"] = std::to_string(quad.n_hermite);
  m["quad.n_laguerre"] = std::to_string(quad.n_laguerre);
  m["quad.rel_tol"] = format_number(quad.rel_tol);
  m["mc.paths"] = std::to_string(mc.n_paths);
  m["mc.horizon"] = format_number(mc.horizon);
  m["mc.steps"] = std::to_string(mc.n_steps);
  m["mc.stretch"] = format_number(mc.grid_stretch);
  m["mc.seed"] = std::to_string(mc.seed);
  m["mc.antithetic"] = mc.antithetic ? "true" : "false";
  m["mc.diagnostic"] = mc.diagnostic ? "true" : "false";
  return m;
}

void set_key(Scenario& s, const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown configuration key '" + key + "'");
  it->second(s, key, trim(value));
}

void load_file(Scenario& s, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const std::string head = trim(text);

  if (!head.empty() && head.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(path + ": " + e.what());
    }
    for (const auto& [key, v] : j.items()) {
      std::string value;
      if (v.is_string()) value = v.get<std::string>();
      else if (v.is_boolean()) value = v.get<bool>() ? "true" : "false";
      else if (v.is_number_unsigned()) value = std::to_string(v.get<std::uint64_t>());
      else if (v.is_number()) value = format_number(v.get<double>());
      else if (v.is_null()) value = "";
      else throw ConfigError(path + ": value of '" + key + "' must be a scalar");
      set_key(s, key, value);
    }
    return;
  }

  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    set_key(s, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

Sweep parse_sweep(const std::string& text) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream is(text);
  while (std::getline(is, part, ':')) parts.push_back(trim(part));
  if (parts.size() != 4) throw ConfigError("sweep must look like param:from:to:steps");
  Sweep sw;
  sw.param = parts[0];
  if (sw.param != "sigma" && sw.param != "nu" && sw.param != "delta" && sw.param != "mu")
    throw ConfigError("sweep parameter must be sigma, nu, delta or mu");
  sw.from = to_double("sweep.from", parts[1]);
  sw.to = to_double("sweep.to", parts[2]);
  sw.steps = to_int("sweep.steps", parts[3]);
  if (!std::isfinite(sw.from) || !std::isfinite(sw.to)) throw ConfigError("sweep range must be finite");
  if (sw.steps < 2) throw ConfigError("sweep needs at least 2 steps");
  return sw;
}

BackendSet parse_backend(const std::string& text) {
  if (text == "closed") return BackendSet::Closed;
  if (text == "quad") return BackendSet::Quad;
  if (text == "mc") return BackendSet::Mc;
  if (text == "all") return BackendSet::All;
  throw ConfigError("backend must be closed, quad, mc or all, got '" + text + "'");
}

const char* to_string(BackendSet b) noexcept {
  switch (b) {
    case BackendSet::Closed: return "closed";
    case BackendSet::Quad: return "quad";
    case BackendSet::Mc: return "mc";
    case BackendSet::All: return "all";
  }
  return "?";
}

void check(const Scenario& s) {
  check_params(s.economy);
  (void)s.make_utility();
  if (s.depreciation && !(*s.depreciation >= 0.0))
    throw DomainError("depreciation rate must be >= 0");
  s.quad.validate();
  s.mc.validate();
}

}  // namespace volwealth::cli
