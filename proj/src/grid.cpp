#include "hl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "hl/errors.hpp"

namespace hl {

namespace {

// Integer k with n = 2 L k, if one exists.
int aligned_k(double half_width, int n) {
  if (n < 2 || n % 2 != 0) return 0;
  const double k = n / (2.0 * half_width);
  const double kr = std::round(k);
  if (kr < 1.0 || std::abs(k - kr) > 1e-9 * k) return 0;
  return static_cast<int>(kr);
}

}  // namespace

int StressGrid::nearest_admissible(double half_width, int n_cells) {
  if (!(half_width > 1.0) || !std::isfinite(half_width)) return 0;
  const int reach = std::max(n_cells, 100000);
  for (int d = 0; d <= reach; ++d) {
    for (int m : {n_cells - d, n_cells + d}) {
      if (m >= 2 && aligned_k(half_width, m) > 0) return m;
    }
  }
  return 0;
}

StressGrid StressGrid::build(double half_width, int n_cells) {
  if (!std::isfinite(half_width) || half_width <= 1.0) {
    std::ostringstream os;
    os << "half_width must be a finite number > 1, got " << half_width;
    throw ConfigError(os.str());
  }
  const int k = aligned_k(half_width, n_cells);
  if (k == 0) {
    std::ostringstream os;
    os << "grid misaligned: n_cells=" << n_cells << " on [-" << half_width
       << ", " << half_width
       << "] does not put -1, 0, +1 on cell edges (need n even and n/(2L) "
          "integer)";
    const int m = nearest_admissible(half_width, n_cells);
    if (m > 0) {
      os << "; nearest admissible n_cells=" << m;
    } else {
      os << "; no admissible n_cells exists for this half_width";
    }
    throw ConfigError(os.str());
  }
  // Snap L so that n = 2 L k holds exactly.
  return StressGrid(static_cast<double>(n_cells) / (2.0 * k), n_cells, k);
}

}  // namespace hl
