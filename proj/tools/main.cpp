#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "cli/scenario.hpp"

using namespace volwealth;
using namespace volwealth::cli;

int main(int argc, char** argv) {
  CLI::App app{"Value of a stochastic capital stock under volatility"};
  app.require_subcommand(1);

  std::string config, backend, sweep, out_path, format;
  std::string seed;
  std::string paths;
  std::vector<std::string> sets;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "key=value or flat JSON scenario file");
    sub->add_option("--backend", backend, "closed | quad | mc | all");
    sub->add_option("--out", out_path, "write output here instead of stdout");
    sub->add_option("--format", format, "csv | json | text");
    sub->add_option("--seed", seed, "Monte Carlo seed (u64)");
    sub->add_option("--paths", paths, "Monte Carlo path count");
    sub->add_option("--set", sets, "override any config key, e.g. --set sigma=0.2")
        ->type_name("KEY=VALUE");
  };
  auto* report = app.add_subcommand("report", "V, p and the dV/dt decomposition at one point");
  auto* sweep_cmd = app.add_subcommand("sweep", "tabulate a parameter sweep");
  auto* verify = app.add_subcommand("verify", "cross-check backends and identities at one point");
  for (auto* sub : {report, sweep_cmd, verify}) add_common(sub);
  sweep_cmd->add_option("--sweep", sweep, "param:from:to:steps with param in sigma|nu|delta|mu");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  Scenario s;
  Format fmt = Format::Text;
  try {
    if (!config.empty()) load_file(s, config);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
      set_key(s, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!backend.empty()) set_key(s, "backend", backend);
    if (!sweep.empty()) set_key(s, "sweep", sweep);
    if (!seed.empty()) set_key(s, "mc.seed", seed);
    if (!paths.empty()) set_key(s, "mc.paths", paths);
    if (!format.empty()) fmt = parse_format(format);
    else if (sweep_cmd->parsed()) fmt = Format::Csv;
    check(s);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  std::ostringstream buffer;
  int code = kOk;
  try {
    if (report->parsed()) code = cmd_report(s, fmt, buffer, std::cerr);
    else if (sweep_cmd->parsed()) code = cmd_sweep(s, fmt, buffer, std::cerr);
    else code = cmd_verify(s, fmt, buffer, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return kDivergence;
  }

  if (out_path.empty()) {
    std::cout << buffer.str();
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
      std::cerr << "cannot write '" << out_path << "'\n";
      return kConfigError;
    }
    f << buffer.str();
  }
  return code;
}
