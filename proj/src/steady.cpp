#include "hl/steady.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "hl/errors.hpp"
#include "hl/evolve.hpp"

namespace hl {

namespace {

// Cell average over [xl, xr] of amp * exp(lambda (sigma - s0)).
double exp_average(double amp, double lambda, double s0, double xl, double xr) {
  const double w = xr - xl;
  if (lambda == 0.0) return amp;
  return amp * std::exp(lambda * (xl - s0)) * std::expm1(lambda * w) / (lambda * w);
}

// Closed-form profile for shear b != 0, arranged so no factor overflows
// while |b| / D stays moderate. Pieces meet at the cell edges -1, 0, 1.
struct Sheared {
  double k, bp, bm, rho, p_right, p_left, c, a2;

  Sheared(double D, double b, double alpha) {
    k = b / D;
    const double r = 0.5 * std::sqrt(k * k + 4.0 / D);
    bp = 0.5 * k + r;
    bm = 0.5 * k - r;
    rho = bm / bp * std::exp(-k);
    p_right = 1.0 / (alpha * bp * (1.0 - rho));
    p_left = std::exp(-k) * p_right;
    c = D / (b * alpha);
    a2 = c / (1.0 - rho);
  }

  double average(double xl, double xr) const {
    if (xl >= 1.0) return exp_average(p_right, bm, 1.0, xl, xr);
    if (xr <= -1.0) return exp_average(p_left, bp, -1.0, xl, xr);
    if (xr <= 0.0) return exp_average(a2, k, 0.0, xl, xr) + a2 - c;
    const double amp = c * (bm / bp) / (1.0 - rho);
    return exp_average(amp, k, 1.0, xl, xr) + a2;
  }

  double tail_mass(double L) const {
    return p_right * std::exp(bm * (L - 1.0)) / -bm + p_left * std::exp(-bp * (L - 1.0)) / bp;
  }
};

SteadyState assemble(double D, double b, double alpha, DensityField profile,
                     double lhs, double truncated) {
  const Observables o = observables(profile, alpha);
  SteadyState s{D, b, std::move(profile), o.mean_stress, std::abs(lhs - alpha),
                o.mass - 1.0, o.fluidity - D, truncated};
  return s;
}

}  // namespace

bool is_degenerate_steady_candidate(const DensityField& candidate, double tol_mass) {
  if (std::abs(candidate.mass() - 1.0) > tol_mass) return false;
  return fluidity(candidate.values(), candidate.grid(), 1.0) == 0.0;
}

double zero_shear_fluidity(double alpha) {
  if (!(alpha > 0.5)) return 0.0;
  // s^2 + s = alpha - 1/2 without cancellation.
  const double s = 2.0 * (alpha - 0.5) / (1.0 + std::sqrt(4.0 * alpha - 1.0));
  return s * s;
}

DensityField zero_shear_profile(double D, double alpha, const StressGrid& grid) {
  const double sd = std::sqrt(D);
  std::vector<double> v(grid.n_cells());
  for (int i = 0; i < grid.n_cells(); ++i) {
    const double xl = grid.edge(i);
    const double xr = grid.edge(i + 1);
    if (xl >= 1.0) {
      v[i] = exp_average(sd / (2.0 * alpha), -1.0 / sd, 1.0, xl, xr);
    } else if (xr <= -1.0) {
      v[i] = exp_average(sd / (2.0 * alpha), 1.0 / sd, -1.0, xl, xr);
    } else {
      v[i] = (sd + 1.0 - std::abs(grid.center(i))) / (2.0 * alpha);
    }
  }
  return DensityField(grid, std::move(v));
}

std::variant<SteadyState, DegenerateFamily> steady_zero_shear(double alpha,
                                                              const StressGrid& grid) {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (alpha <= 0.5) {
    return DegenerateFamily{alpha,
                            "alpha <= 1/2: only densities supported in [-1, 1] are stationary"};
  }
  const double D = zero_shear_fluidity(alpha);
  const double sd = std::sqrt(D);
  const double truncated = D / alpha * std::exp(-(grid.half_width() - 1.0) / sd);
  return assemble(D, 0.0, alpha, zero_shear_profile(D, alpha, grid), D + sd + 0.5, truncated);
}

double normalization_lhs(double D, double b) {
  const double x = b / D;
  const double r = 0.5 * std::sqrt(x * x + 4.0 / D);
  const double bm = 0.5 * x - r;
  const double em = std::expm1(-x);
  // (D/b)[(1 + b+) + (b- - 1) e^{-x}] / (b+ - b- e^{-x}) with b+ + b- = x.
  return (1.0 + (bm - 1.0) * em / x) / (2.0 * r - bm * em) + D;
}

double normalization_f(double z, double b) {
  b = std::abs(b);  // the form holds for b > 0; reflection sigma -> -sigma covers b < 0
  const double q = std::sqrt(z * z + 4.0 * z);
  const double ct = 1.0 / std::tanh(z / (2.0 * b));
  const double num = 1.0 + z * ct / (2.0 * b) + q / (2.0 * b);
  return b * b / z + 2.0 * b * b / z * num / (z + q * ct);
}

DensityField sheared_profile(double D, double b, double alpha, const StressGrid& grid) {
  if (!(D > 0.0) || b == 0.0) throw ConfigError("sheared profile needs D > 0 and b != 0");
  if (std::abs(b) / D > 600.0) {
    throw NumericalError("shear too strong relative to D for the closed-form profile");
  }
  const Sheared s(D, b, alpha);
  std::vector<double> v(grid.n_cells());
  for (int i = 0; i < grid.n_cells(); ++i) v[i] = std::max(0.0, s.average(grid.edge(i), grid.edge(i + 1)));
  return DensityField(grid, std::move(v));
}

SteadyState steady_sheared(double alpha, double b, const StressGrid& grid, double tol_root) {
  if (!(tol_root > 0.0)) throw ConfigError("steady_sheared requires tol_root > 0");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (b == 0.0 || !std::isfinite(b)) {
    throw ConfigError("steady_sheared requires a finite b != 0; use the zero-shear solver for b = 0");
  }
  if (alpha > 0.5 && std::abs(b) < 1e-6) {
    const double D = zero_shear_fluidity(alpha);
    const double sd = std::sqrt(D);
    SteadyState s = assemble(D, b, alpha, zero_shear_profile(D, alpha, grid), D + sd + 0.5,
                             D / alpha * std::exp(-(grid.half_width() - 1.0) / sd));
    return s;
  }
  const double ab = std::abs(b);
  auto g = [&](double D) { return normalization_lhs(D, ab) - alpha; };
  double lo = std::min(alpha, 1.0);
  double hi = lo;
  int guard = 0;
  if (g(lo) > 0.0) {
    while (g(lo) > 0.0) {
      hi = lo;
      lo *= 0.5;
      if (++guard > 2000) throw NumericalError("steady root-find failed to bracket from below");
    }
  } else {
    while (g(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
      if (++guard > 2000) throw NumericalError("steady root-find failed to bracket from above");
    }
  }
  while (hi - lo > tol_root * hi) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double D = 0.5 * (lo + hi);
  const Sheared sh(D, b, alpha);
  return assemble(D, b, alpha, sheared_profile(D, b, alpha, grid),
                  normalization_lhs(D, ab), sh.tail_mass(grid.half_width()));
}

FlowCurve flow_curve(double alpha, const std::vector<double>& b_list, const StressGrid& grid,
                     double tol_root) {
  for (double b : b_list) {
    if (b == 0.0) {
      throw ConfigError("flow curve shear list contains 0; the zero-shear state has its own solver");
    }
  }
  std::vector<std::future<SteadyState>> jobs;
  for (double b : b_list) {
    jobs.push_back(std::async(std::launch::async, [=] { return steady_sheared(alpha, b, grid, tol_root); }));
  }
  FlowCurve fc;
  for (auto& j : jobs) {
    const SteadyState s = j.get();
    fc.points.push_back({s.b_value, s.d_value, s.tau, s.mass_defect});
  }
  std::sort(fc.points.begin(), fc.points.end(),
            [](const FlowPoint& x, const FlowPoint& y) { return x.b < y.b; });
  for (const FlowPoint& p : fc.points) {
    for (const FlowPoint& q : fc.points) {
      if (p.b > 0.0 && q.b == -p.b) {
        fc.has_pairs = true;
        fc.max_odd_defect = std::max(fc.max_odd_defect, std::abs(p.tau + q.tau));
      }
    }
  }
  return fc;
}

SteadyDefect steady_residual(const SteadyState& state, double alpha) {
  const StressGrid& g = state.profile.grid();
  SteadyDefect d;
  const std::vector<double> r =
      apply_operator(state.profile, state.d_value, state.b_value, alpha, Advection::Centered);
  double s = 0.0;
  for (double x : r) {
    s += x * x;
    d.residual_linf = std::max(d.residual_linf, std::abs(x));
  }
  d.residual_l2 = std::sqrt(s * g.cell_width());
  const DensityField discrete =
      solve_frozen_steady(g, state.d_value, state.b_value, alpha, Advection::Centered);
  d.defect_l2 = l2_distance(state.profile, discrete);
  d.defect_linf = linf_distance(state.profile, discrete);
  d.self_consistency_gap =
      std::abs(fluidity(state.profile.values(), g, alpha) - state.d_value);
  return d;
}

}  // namespace hl
