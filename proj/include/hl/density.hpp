#pragma once

#include <functional>
#include <vector>

#include "hl/grid.hpp"

namespace hl {

/// Nonnegative cell averages of a density on a StressGrid.
class DensityField {
 public:
  /// Throws ConfigError on size mismatch, negative or non-finite values.
  DensityField(const StressGrid& grid, std::vector<double> values);
  explicit DensityField(const StressGrid& grid);  // identically zero

  const StressGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](int i) const { return values_[i]; }
  int size() const { return static_cast<int>(values_.size()); }

  double mass() const;
  double max_value() const;

  /// Rescales to unit mass; returns the factor applied.
  double normalize();

  /// Leftmost and rightmost edges of cells with positive value.
  /// Returns false when the field vanishes identically.
  bool support(double& lo, double& hi) const;

 private:
  StressGrid grid_;
  std::vector<double> values_;
};

struct Observables {
  double mass = 0.0;
  double fluidity = 0.0;  // D = alpha * integral over |sigma| > 1
  double mean_stress = 0.0;
  double abs_moment = 0.0;
};

Observables observables(const DensityField& field, double alpha);

/// alpha * dsigma * sum over |sigma| > 1; exact zero when support is inside.
double fluidity(const std::vector<double>& values, const StressGrid& grid,
                double alpha);

/// Exact integral of the piecewise-constant field over [a, b].
double integrate_between(const DensityField& field, double a, double b);

/// Mass of the field outside [-1 - c, 1 - c], i.e. on {|sigma + c| > 1}.
/// Sum of nonnegative terms: exactly zero when the support fits inside.
double mass_outside_shifted(const DensityField& field, double c);

/// Exact cell averages of the normalized indicator of [a, b].
DensityField uniform_density(const StressGrid& grid, double a, double b);

/// Exact cell averages of a normal density (mean, standard deviation).
DensityField gaussian_density(const StressGrid& grid, double mean,
                              double width);

/// Cell averages of f by Gauss-Legendre quadrature on each cell.
DensityField project(const StressGrid& grid,
                     const std::function<double(double)>& f);

double l2_distance(const DensityField& a, const DensityField& b);
double linf_distance(const DensityField& a, const DensityField& b);

}  // namespace hl
