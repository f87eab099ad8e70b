#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hl/config.hpp"
#include "hl/density.hpp"

namespace hl {

/// Projects the configured initial condition and rescales it to unit mass.
/// The applied factor is returned through renormalization.
DensityField build_initial(const RunConfig& config, const StressGrid& grid,
                           double& renormalization);

/// Reads "sigma,p" samples (one header line) as a piecewise-linear density
/// vanishing outside the sampled range and projects it on the grid.
DensityField load_density_csv(const std::filesystem::path& path, const StressGrid& grid);

struct RunResult {
  std::vector<std::string> files;  // written, relative to the output directory
  double renormalization = 1.0;
};

/// Runs the scenario and writes its CSV/JSON outputs plus manifest.ini and
/// manifest.json into out_dir. Output bytes depend only on the config.
RunResult run(const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace hl
