#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "evaluate.hpp"
#include "format.hpp"
#include "verify.hpp"
#include "volwealth/threads.hpp"

namespace volwealth::cli {

namespace {

Cell num(std::optional<double> x) {
  if (!x || !std::isfinite(*x)) return std::monostate{};
  return *x;
}

const std::vector<std::string> kValueColumns = {"V", "p", "ito_term", "price_term", "dV_dt",
                                                "dV_dsigma"};

void append_values(std::vector<Cell>& row, const BackendRow* b) {
  if (!b) {
    row.insert(row.end(), kValueColumns.size(), std::monostate{});
    return;
  }
  const ValueReport& r = b->report;
  for (double x : {r.value, r.accounting_price, r.ito_term, r.price_term, r.dV_dt, r.dV_dsigma})
    row.push_back(num(x));
}

void append_point_fields(std::vector<Cell>& row, const PointResult& pr) {
  row.push_back(num(pr.nu_star));
  row.push_back(num(pr.validation.sigma_c));
  row.push_back(std::string(to_string(pr.validation.convergence)));
  row.push_back(pr.validation.near_boundary);
  row.push_back(num(pr.disagreement));
}

const std::vector<std::string> kPointColumns = {"nu_star", "sigma_c", "convergence",
                                                "near_boundary", "disagreement"};

Table report_table(const PointResult& pr) {
  Table t;
  t.columns = {"backend"};
  t.columns.insert(t.columns.end(), kValueColumns.begin(), kValueColumns.end());
  t.columns.insert(t.columns.end(), {"V_se", "p_se"});
  t.columns.insert(t.columns.end(), kPointColumns.begin(), kPointColumns.end());
  for (const auto& b : pr.rows) {
    std::vector<Cell> row{b.backend};
    append_values(row, &b);
    row.push_back(b.mc ? num(b.mc->value.std_error) : Cell{});
    row.push_back(b.mc ? num(b.mc->price.std_error) : Cell{});
    append_point_fields(row, pr);
    t.rows.push_back(std::move(row));
  }
  return t;
}

void print_text_report(std::ostream& out, const Scenario& s, const PointResult& pr) {
  char line[160];
  out << "economy     " << describe(pr.params) << '\n';
  out << "utility     " << s.effective(s.economy).utility.describe() << '\n';
  out << "convergence " << to_string(pr.validation.convergence)
      << (pr.validation.near_boundary ? " (near boundary)" : "") << '\n';
  if (pr.validation.sigma_c) out << "sigma_c     " << format_number(*pr.validation.sigma_c) << '\n';
  if (pr.nu_star) out << "nu_star     " << format_number(*pr.nu_star) << '\n';
  else if (!pr.nu_star_note.empty()) out << "nu_star     (" << pr.nu_star_note << ")\n";
  for (const auto& b : pr.rows) {
    out << '\n' << '[' << b.backend << "]\n";
    const ValueReport& r = b.report;
    auto put = [&](const char* name, double x, std::optional<double> se) {
      if (se) std::snprintf(line, sizeof line, "  %-11s %.17g +- %.3g\n", name, x, *se);
      else std::snprintf(line, sizeof line, "  %-11s %.17g\n", name, x);
      out << line;
    };
    auto se = [&](const monte_carlo::EstimateWithError monte_carlo::McReport::*f)
        -> std::optional<double> {
      if (!b.mc) return std::nullopt;
      return ((*b.mc).*f).std_error;
    };
    put("V", r.value, se(&monte_carlo::McReport::value));
    put("p", r.accounting_price, se(&monte_carlo::McReport::price));
    put("ito_term", r.ito_term, se(&monte_carlo::McReport::ito_term));
    put("price_term", r.price_term, se(&monte_carlo::McReport::price_term));
    put("dV_dt", r.dV_dt, se(&monte_carlo::McReport::dV_dt));
    put("dV_dsigma", r.dV_dsigma, se(&monte_carlo::McReport::dV_dsigma));
  }
  if (pr.disagreement) out << "\ndisagreement " << format_number(*pr.disagreement) << '\n';
}

void set_param(EconomyParams& p, const std::string& name, double x) {
  if (name == "sigma") p.sigma = x;
  else if (name == "nu") p.nu = x;
  else if (name == "delta") p.delta = x;
  else p.mu = x;
}

}  // namespace

Format parse_format(const std::string& text) {
  if (text == "text") return Format::Text;
  if (text == "csv") return Format::Csv;
  if (text == "json") return Format::Json;
  throw ConfigError("format must be csv, json or text, got '" + text + "'");
}

int cmd_report(const Scenario& s, Format f, std::ostream& out, std::ostream& err) {
  const PointResult pr = evaluate_point(s, s.economy, true);
  switch (f) {
    case Format::Text: print_text_report(out, s, pr); break;
    case Format::Csv: write_csv(out, report_table(pr)); break;
    case Format::Json: write_json(out, s.to_map(), report_table(pr), {}); break;
  }
  if (pr.divergence) {
    err << "divergence: " << *pr.divergence << '\n';
    return kDivergence;
  }
  return kOk;
}

int cmd_sweep(const Scenario& s, Format f, std::ostream& out, std::ostream& err) {
  if (!s.sweep) throw ConfigError("sweep needs --sweep param:from:to:steps (or a sweep key)");
  const Sweep& sw = *s.sweep;
  const int n = sw.steps;
  std::vector<PointResult> results(n);
  std::vector<std::string> errors(n);

  // Points run in parallel; each point's Monte Carlo stays single-threaded so
  // the total never exceeds the thread budget. Output order is the grid order.
  Scenario inner = s;
  const unsigned threads = std::min<unsigned>(resolve_threads(0), static_cast<unsigned>(n));
  if (threads > 1) inner.mc.threads = 1;
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      EconomyParams p = s.economy;
      set_param(p, sw.param, sw.at(i));
      try {
        results[i] = evaluate_point(inner, p, s.nu_star);
      } catch (const DomainError& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (int i = 0; i < n; ++i)
    if (!errors[i].empty())
      throw DomainError("sweep point " + sw.param + " = " + format_number(sw.at(i)) + ": " +
                        errors[i]);

  Table t;
  t.columns = {sw.param, "backend"};
  t.columns.insert(t.columns.end(), kValueColumns.begin(), kValueColumns.end());
  t.columns.insert(t.columns.end(), kPointColumns.begin(), kPointColumns.end());
  const std::string primary = backends_of(s.backend).front();
  for (int i = 0; i < n; ++i) {
    const PointResult& pr = results[i];
    const BackendRow* b = pr.rows.empty() ? nullptr : &pr.rows.front();
    std::vector<Cell> row{sw.at(i), b ? b->backend : primary};
    append_values(row, b);
    append_point_fields(row, pr);
    t.rows.push_back(std::move(row));
  }
  switch (f) {
    case Format::Text:
    case Format::Csv: write_csv(out, t); break;
    case Format::Json: write_json(out, s.to_map(), t, {}); break;
  }
  (void)err;
  return kOk;
}

int cmd_verify(const Scenario& s, Format f, std::ostream& out, std::ostream& err) {
  Scenario all = s;
  all.backend = BackendSet::All;
  const PointResult pr = evaluate_point(all, s.economy, true);
  if (!pr.validation.convergent()) {
    if (f == Format::Json) write_json(out, s.to_map(), report_table(pr), {});
    err << "divergence: " << pr.divergence.value_or("divergent economy") << '\n';
    return kDivergence;
  }
  const std::vector<Check> checks = verify_point(s);
  bool ok = true;
  for (const Check& c : checks) ok = ok && c.passed;

  if (f == Format::Json) {
    write_json(out, s.to_map(), report_table(pr), checks);
  } else {
    if (pr.validation.near_boundary) out << "warning: parameters are next to the divergence boundary\n";
    for (const Check& c : checks) {
      out << (c.passed ? "PASS " : "FAIL ") << c.name;
      if (c.residual) out << " residual=" << format_number(*c.residual);
      if (c.tolerance) out << " tolerance=" << format_number(*c.tolerance);
      out << "  " << c.detail << '\n';
    }
  }
  if (!ok) {
    for (const Check& c : checks)
      if (!c.passed)
        err << "check failed: " << c.name << " residual="
            << (c.residual ? format_number(*c.residual) : std::string("n/a")) << '\n';
    return kCheckFailed;
  }
  return kOk;
}

}  // namespace volwealth::cli
