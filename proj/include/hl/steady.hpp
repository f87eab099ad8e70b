#pragma once

#include <string>
#include <variant>
#include <vector>

#include "hl/density.hpp"

namespace hl {

struct SteadyState {
  double d_value = 0.0;
  double b_value = 0.0;
  DensityField profile;
  double tau = 0.0;
  double norm_residual = 0.0;         // |lhs of the normalization - alpha|
  double mass_defect = 0.0;           // discrete mass - 1
  double self_consistency_gap = 0.0;  // fluidity(profile) - d_value
  double truncated_mass = 0.0;        // analytic mass beyond +-L
};

/// Only compactly supported densities in [-1, 1] are stationary at zero shear.
struct DegenerateFamily {
  double alpha = 0.0;
  std::string reason;
};

/// True iff the candidate is a probability density supported in [-1, 1].
bool is_degenerate_steady_candidate(const DensityField& candidate,
                                    double tol_mass);

/// For alpha > 1/2, the unique state with sqrt(D) solving s^2 + s = alpha - 1/2.
std::variant<SteadyState, DegenerateFamily> steady_zero_shear(
    double alpha, const StressGrid& grid);

/// D for zero shear, or 0 when alpha <= 1/2.
double zero_shear_fluidity(double alpha);

/// Left side of the normalization condition (to be matched with alpha);
/// equals alpha * mass of the closed-form profile. Even in b, increasing in D.
double normalization_lhs(double D, double b);

/// The same left side written in z = b^2 / D; evaluated at |b|.
double normalization_f(double z, double b);

/// Exact cell averages of the closed-form profile for given D and b != 0.
DensityField sheared_profile(double D, double b, double alpha,
                             const StressGrid& grid);

/// Exact cell averages of the zero-shear closed form for given D.
DensityField zero_shear_profile(double D, double alpha, const StressGrid& grid);

/// Root of normalization_lhs = alpha by geometric bracketing and bisection
/// to tol_root relative width, then the profile. For alpha > 1/2 and
/// |b| < 1e-6 the zero-shear closed form is used instead.
SteadyState steady_sheared(double alpha, double b, const StressGrid& grid,
                           double tol_root = 1e-12);

struct FlowPoint {
  double b = 0.0;
  double d_value = 0.0;
  double tau = 0.0;
  double mass_defect = 0.0;
};

struct FlowCurve {
  std::vector<FlowPoint> points;  // sorted by b
  double max_odd_defect = 0.0;    // max |tau(b) + tau(-b)| over pairs present
  bool has_pairs = false;
};

/// Steady states evaluated concurrently; throws ConfigError for b = 0.
FlowCurve flow_curve(double alpha, const std::vector<double>& b_list,
                     const StressGrid& grid, double tol_root = 1e-12);

struct SteadyDefect {
  double residual_l2 = 0.0;  // discrete operator applied to the profile
  double residual_linf = 0.0;
  double defect_l2 = 0.0;  // profile minus the discrete frozen solution
  double defect_linf = 0.0;
  double self_consistency_gap = 0.0;
};

/// Frozen-coefficient check of a state against the centred spatial operator.
///
/// The raw residual measures the equation on cell averages; the defect is
/// that residual pulled back through the operator, i.e. the distance to the
/// discrete stationary solution with the same D and b.
SteadyDefect steady_residual(const SteadyState& state, double alpha);

}  // namespace hl
