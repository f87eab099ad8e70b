#include <CLI11.hpp>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hl/config.hpp"
#include "hl/errors.hpp"
#include "hl/run.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

struct Invocation {
  std::string config;
  std::string out = ".";
  std::vector<std::string> overrides;
};

int execute(const std::string& scenario, const Invocation& inv) {
  std::ifstream is(inv.config);
  if (!is) {
    std::cerr << "hlab: cannot read config '" << inv.config << "'\n";
    return kConfigError;
  }
  std::stringstream buf;
  buf << is.rdbuf();
  std::vector<std::string> overrides = inv.overrides;
  overrides.push_back("run.scenario=" + scenario);
  const std::filesystem::path base = std::filesystem::absolute(inv.config).parent_path();
  try {
    const hl::RunConfig cfg = hl::parse_config(buf.str(), overrides, base);
    hl::run(cfg, inv.out);
  } catch (const hl::ConfigError& e) {
    std::cerr << "hlab: configuration error:\n" << e.what() << "\n";
    return kConfigError;
  } catch (const hl::NumericalError& e) {
    std::cerr << "hlab: numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "hlab: " << e.what() << "\n";
    return kNumericalError;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stress-distribution model: evolution, steady states and uniqueness checks"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> scenarios = {
      {"evolve", "time evolution with trace and profile snapshots"},
      {"steady", "closed-form steady state at a fixed shear rate"},
      {"flowcurve", "steady stress against shear rate"},
      {"degeneracy", "uniqueness verdict and escape profile for degenerate data"},
      {"sweep", "vanishing-viscosity sweep"},
  };
  std::vector<Invocation> invocations(scenarios.size());
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    CLI::App* sub = app.add_subcommand(scenarios[k].first, scenarios[k].second);
    Invocation& inv = invocations[k];
    sub->add_option("--config", inv.config, "INI configuration file")->required();
    sub->add_option("--out", inv.out, "output directory")->capture_default_str();
    sub->add_option("--override", inv.overrides, "section.key=value, repeatable")
        ->take_all()
        ->allow_extra_args(false);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    if (app.got_subcommand(scenarios[k].first)) return execute(scenarios[k].first, invocations[k]);
  }
  return kConfigError;
}
