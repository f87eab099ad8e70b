#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hl/evolve.hpp"
#include "hl/params.hpp"
#include "hl/shear.hpp"

namespace hl {

enum class Scenario { Evolve, Steady, FlowCurve, Degeneracy, Sweep };

const char* to_string(Scenario s);
/// Throws ConfigError for unknown names.
Scenario parse_scenario(const std::string& name);

struct InitialSpec {
  std::string kind = "uniform";  // uniform | gaussian | steady | file
  double a = -1.0;               // uniform support
  double b = 1.0;
  double mean = 0.0;  // gaussian
  double width = 1.0;
  double shear = 0.0;  // steady profile shear; alpha from [model]
  std::string path;    // file: CSV with header sigma,p
};

struct RunConfig {
  Scenario scenario = Scenario::Evolve;
  ModelParams params;
  bool degenerate_mode = false;  // admits epsilon = 0
  InitialSpec initial;
  ShearProtocol protocol;
  EvolveConfig evolve;
  double steady_shear = 0.0;
  std::vector<double> flow_shears;
  std::vector<double> sweep_eps;
  double sweep_t_from = 0.0;
  double degeneracy_gamma = 0.0;
  double degeneracy_horizon = 1.0;
  int degeneracy_knots = 1000;
  std::filesystem::path base_dir;  // resolves relative file paths

  /// Every resolved setting as an INI document that parses back to this.
  std::string canonical_ini() const;
};

/// Parses the sectioned key = value grammar documented in README.md.
///
/// overrides are "section.key=value" strings applied before validation.
/// All problems found are reported together in one ConfigError, one per
/// line: unknown sections or keys, missing sections, malformed numbers,
/// misaligned grids (with the nearest admissible n_cells) and
/// scenario-specific constraints.
RunConfig parse_config(const std::string& text,
                       const std::vector<std::string>& overrides = {},
                       const std::filesystem::path& base_dir = ".");

/// Formats with 17 significant digits ("%.17g").
std::string format_double(double x);

}  // namespace hl
