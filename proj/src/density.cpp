#include "hl/density.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <sstream>

#include "hl/errors.hpp"

namespace hl {

DensityField::DensityField(const StressGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_.n_cells()) {
    std::ostringstream os;
    os << "density has " << values_.size() << " values for a grid of "
       << grid_.n_cells() << " cells";
    throw ConfigError(os.str());
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
      std::ostringstream os;
      os << "density value " << values_[i] << " at cell " << i
         << " is negative or not finite";
      throw ConfigError(os.str());
    }
  }
}

DensityField::DensityField(const StressGrid& grid)
    : grid_(grid), values_(grid.n_cells(), 0.0) {}

double DensityField::mass() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * grid_.cell_width();
}

double DensityField::max_value() const {
  return values_.empty() ? 0.0
                         : *std::max_element(values_.begin(), values_.end());
}

double DensityField::normalize() {
  const double m = mass();
  if (!(m > 0.0)) throw ConfigError("cannot normalize a field of zero mass");
  const double f = 1.0 / m;
  for (double& v : values_) v *= f;
  return f;
}

bool DensityField::support(double& lo, double& hi) const {
  int first = -1;
  int last = -1;
  for (int i = 0; i < size(); ++i) {
    if (values_[i] > 0.0) {
      if (first < 0) first = i;
      last = i;
    }
  }
  if (first < 0) return false;
  lo = grid_.edge(first);
  hi = grid_.edge(last + 1);
  return true;
}

double fluidity(const std::vector<double>& values, const StressGrid& grid,
                double alpha) {
  double s = 0.0;
  for (int i = 0; i < grid.inner_begin(); ++i) s += values[i];
  for (int i = grid.inner_end(); i < grid.n_cells(); ++i) s += values[i];
  return alpha * grid.cell_width() * s;
}

Observables observables(const DensityField& field, double alpha) {
  const StressGrid& g = field.grid();
  Observables o;
  double m = 0.0;
  double tau = 0.0;
  double am = 0.0;
  for (int i = 0; i < g.n_cells(); ++i) {
    const double v = field[i];
    const double c = g.center(i);
    m += v;
    tau += c * v;
    am += std::abs(c) * v;
  }
  const double h = g.cell_width();
  o.mass = m * h;
  o.mean_stress = tau * h;
  o.abs_moment = am * h;
  o.fluidity = fluidity(field.values(), g, alpha);
  return o;
}

double integrate_between(const DensityField& field, double a, double b) {
  const StressGrid& g = field.grid();
  const double L = g.half_width();
  a = std::max(a, -L);
  b = std::min(b, L);
  if (!(b > a)) return 0.0;
  const int k = g.cells_per_unit();
  const int n = g.n_cells();
  const int i0 = std::clamp(static_cast<int>(std::floor((a + L) * k)), 0, n - 1);
  const int i1 = std::clamp(static_cast<int>(std::floor((b + L) * k)), 0, n - 1);
  double s = 0.0;
  for (int i = i0; i <= i1; ++i) {
    const double lo = std::max(a, g.edge(i));
    const double hi = std::min(b, g.edge(i + 1));
    if (hi > lo) s += field[i] * (hi - lo);
  }
  return s;
}

double mass_outside_shifted(const DensityField& field, double c) {
  const double L = field.grid().half_width();
  return integrate_between(field, -L, -1.0 - c) +
         integrate_between(field, 1.0 - c, L);
}

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

DensityField uniform_density(const StressGrid& grid, double a, double b) {
  if (!(b > a)) throw ConfigError("uniform density needs a < b");
  if (a < -grid.half_width() || b > grid.half_width()) {
    throw ConfigError("uniform density support exceeds the grid");
  }
  std::vector<double> v(grid.n_cells(), 0.0);
  const double h = grid.cell_width();
  for (int i = 0; i < grid.n_cells(); ++i) {
    const double lo = std::max(a, grid.edge(i));
    const double hi = std::min(b, grid.edge(i + 1));
    if (hi > lo) v[i] = (hi - lo) / (h * (b - a));
  }
  return DensityField(grid, std::move(v));
}

DensityField gaussian_density(const StressGrid& grid, double mean,
                              double width) {
  if (!(width > 0.0)) throw ConfigError("gaussian width must be positive");
  std::vector<double> v(grid.n_cells(), 0.0);
  const double h = grid.cell_width();
  for (int i = 0; i < grid.n_cells(); ++i) {
    const double zl = (grid.edge(i) - mean) / width;
    const double zr = (grid.edge(i + 1) - mean) / width;
    // Difference of upper tails on the right keeps precision far out.
    const double p = zl >= 0.0 ? normal_cdf(-zl) - normal_cdf(-zr)
                               : normal_cdf(zr) - normal_cdf(zl);
    v[i] = std::max(p, 0.0) / h;
  }
  return DensityField(grid, std::move(v));
}

DensityField project(const StressGrid& grid,
                     const std::function<double(double)>& f) {
  using boost::math::quadrature::gauss;
  std::vector<double> v(grid.n_cells(), 0.0);
  const double h = grid.cell_width();
  for (int i = 0; i < grid.n_cells(); ++i) {
    v[i] = gauss<double, 10>::integrate(f, grid.edge(i), grid.edge(i + 1)) / h;
  }
  return DensityField(grid, std::move(v));
}

double l2_distance(const DensityField& a, const DensityField& b) {
  if (!(a.grid() == b.grid())) throw ConfigError("fields on different grids");
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s * a.grid().cell_width());
}

double linf_distance(const DensityField& a, const DensityField& b) {
  if (!(a.grid() == b.grid())) throw ConfigError("fields on different grids");
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

}  // namespace hl
