#include "hl/tridiagonal.hpp"

#include "hl/errors.hpp"

namespace hl {

TridiagonalSolver::TridiagonalSolver(const std::vector<double>& lower,
                                     const std::vector<double>& diag,
                                     const std::vector<double>& upper)
    : lower_(lower), inv_pivot_(diag.size()), upper_scaled_(diag.size(), 0.0) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n) {
    throw ConfigError("tridiagonal bands have mismatched sizes");
  }
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pivot = diag[i] - (i > 0 ? lower[i] * prev : 0.0);
    if (pivot == 0.0) throw NumericalError("zero pivot in tridiagonal solve");
    inv_pivot_[i] = 1.0 / pivot;
    prev = i + 1 < n ? upper[i] * inv_pivot_[i] : 0.0;
    upper_scaled_[i] = prev;
  }
}

std::vector<double> TridiagonalSolver::solve(
    const std::vector<double>& rhs) const {
  const std::size_t n = inv_pivot_.size();
  std::vector<double> x(n);
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    prev = (rhs[i] - (i > 0 ? lower_[i] * prev : 0.0)) * inv_pivot_[i];
    x[i] = prev;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= upper_scaled_[i] * x[i + 1];
  return x;
}

}  // namespace hl
