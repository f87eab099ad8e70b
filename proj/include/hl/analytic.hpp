#pragma once

#include <limits>
#include <vector>

#include "hl/density.hpp"
#include "hl/shear.hpp"
#include "hl/trace.hpp"

namespace hl {

/// Normal density with standard deviation eta; throws ConfigError for eta <= 0.
double gaussian_kernel(double eta, double x);

/// Integral of exp(-t^2) over [z, inf); equals (sqrt(pi)/2) std::erfc(z).
double erfc_paper(double z);

/// Standard normal distribution function.
double normal_cdf(double x);

/// Cell averages of (field * phi_eta)(sigma - shift).
///
/// The field is read as piecewise constant, so the result is the exact cell
/// average of the exact convolution; eta = 0 is the pure shift. Mass leaving
/// [-L, L] is lost.
DensityField smear(const DensityField& field, double eta, double shift);

/// Cell averages of phi_eta(sigma - x0); eta = 0 gives the Dirac at x0
/// (split evenly when x0 is an edge). Cells beyond 12 eta are left at zero.
std::vector<double> point_source(const StressGrid& grid, double x0, double eta);

struct EnvelopePair {
  DensityField lower;
  DensityField upper;
  double t = 0.0;
};

/// Lower and upper comparison envelopes at time t.
///
/// a_history is the diffusion coefficient D + eps used on each step and
/// dq_history the reinjected fluidity; both must cover [0, t].
EnvelopePair envelopes(const DensityField& p0, const StepTrace& a_history,
                       const StepTrace& dq_history,
                       const ShearProtocol& protocol, double t, double alpha);

/// exp(-gamma t) p0 smeared to squared width 2 * integral of D over [0, t].
DensityField heat_reconstruct(const DensityField& p0, const StepTrace& d_trace,
                              double gamma, double t);

/// Same with the accumulated integral X = integral of D given directly.
DensityField heat_reconstruct_width(const DensityField& p0, double x_integral,
                                    double gamma, double t);

struct BoundsReport {
  double nu1 = 0.0;
  double nu2 = std::numeric_limits<double>::infinity();  // inf: not applicable
  double nu = 0.0;
  double linf_bound = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double t_star_input = std::numeric_limits<double>::infinity();
  bool degenerate = false;  // D(p0) = 0, so nu = 0
};

/// Lower fluidity bound nu and the a-priori constants on [0, T].
///
/// nu1 is taken over [0, min(T, t*/2)] so that nu = min(nu1, nu2) is a valid
/// bound when the support can enter the non-yielding window at t*.
BoundsReport apriori_bounds(const DensityField& p0,
                            const ShearProtocol& protocol, double alpha,
                            double T);

/// min over t in [0, T] of the mass of p0 on {|sigma + chi(t)| > 1}; exact for
/// piecewise-constant p0.
double min_outside_mass(const DensityField& p0, const ShearProtocol& protocol,
                        double T);

}  // namespace hl
