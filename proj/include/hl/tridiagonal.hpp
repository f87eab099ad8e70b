#pragma once

#include <vector>

namespace hl {

/// LU factors of a tridiagonal matrix (Thomas algorithm, no pivoting).
///
/// Row i reads lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1];
/// lower[0] and upper[n-1] are ignored. Stable for diagonally dominant rows.
class TridiagonalSolver {
 public:
  TridiagonalSolver(const std::vector<double>& lower,
                    const std::vector<double>& diag,
                    const std::vector<double>& upper);

  std::vector<double> solve(const std::vector<double>& rhs) const;

 private:
  std::vector<double> lower_;
  std::vector<double> inv_pivot_;
  std::vector<double> upper_scaled_;
};

}  // namespace hl
