#include "hl/params.hpp"

#include <cmath>
#include <sstream>

#include "hl/errors.hpp"
#include "hl/grid.hpp"

namespace hl {

void ModelParams::validate(bool degenerate_mode) const {
  std::ostringstream os;
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    os << "alpha must be positive, got " << alpha;
  } else if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    os << "epsilon must lie in [0, 1], got " << epsilon;
  } else if (epsilon == 0.0 && !degenerate_mode) {
    os << "epsilon = 0 is allowed only in degenerate mode";
  } else if (!(tol_mass > 0.0) || !(tol_root > 0.0) || !(tol_ode > 0.0)) {
    os << "tolerances must be positive";
  }
  if (!os.str().empty()) throw ConfigError(os.str());
  StressGrid::build(half_width, n_cells);
}

}  // namespace hl
