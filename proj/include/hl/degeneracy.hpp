#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hl/density.hpp"
#include "hl/shear.hpp"

namespace hl {

/// F(x) for data supported in [-1, 1]; F(0) = D(p0) = 0.
///
/// Cellwise exact: each cell integral of erfc_paper reduces to differences
/// of its antiderivative. Throws ConfigError if x < 0 or D(p0) > 0.
double f_eval(const DensityField& p0, double x, double alpha);

/// Closed form of F for p0 uniform on [-1, 1]; throws ConfigError if x <= 0.
double f_uniform_closed(double x, double alpha);

enum class Verdict { Unique, NonUnique, Inconclusive };

const char* to_string(Verdict v);

struct DegeneracyReport {
  Verdict verdict = Verdict::Inconclusive;
  /// Integral of 1/F over (0, 1]; empty when divergent or undecided.
  std::optional<double> criterion_integral;
  double small_x_exponent = 0.0;  // fitted beta in F ~ c x^beta on [1e-8, 1e-2]
  double fit_residual = 0.0;      // rms log-residual of that fit
  bool super_power_decay = false;
  double t_c = 0.0;
  std::string reason;
};

/// Uniqueness criterion for degenerate data: unique iff the integral of 1/F
/// near 0 diverges.
///
/// A clean power fit decides by beta < 1 - 0.05 or beta > 1 + 0.05; decay
/// faster than any power means Unique; otherwise decade increments of the
/// cutoff integral are extrapolated, with Inconclusive when they stall.
DegeneracyReport classify(const DensityField& p0, double alpha,
                          const ShearProtocol& protocol = ShearProtocol());

/// z(t) solving integral_0^z dx/F = (1 - exp(-gamma t)) / gamma (t if gamma = 0).
class EscapeProfile {
 public:
  double gamma() const { return gamma_; }
  double alpha() const { return alpha_; }
  double horizon() const { return times_.back(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& z() const { return z_; }
  /// dz/dt = exp(-gamma t) F(z) at the knots.
  const std::vector<double>& rate() const { return rate_; }

  /// Cubic Hermite interpolation on the knots; t in [0, horizon].
  double z_at(double t) const;

  /// max over knots of |dz/dt - exp(-gamma t) F(z)| with dz/dt from
  /// fourth-order finite differences of the z table.
  double ode_residual(const DensityField& p0) const;

 private:
  friend EscapeProfile escape_profile(const DensityField&, double, double,
                                      double, int);
  double gamma_ = 0.0;
  double alpha_ = 1.0;
  std::vector<double> times_;
  std::vector<double> z_;
  std::vector<double> rate_;
};

/// Inverts the cumulative G(z) = integral_0^z dx/F at n_knots + 1 equispaced
/// times on [0, T]. The power-law head of G is integrated in closed form.
/// Throws ConfigError unless classify() returns NonUnique and gamma >= 0.
EscapeProfile escape_profile(const DensityField& p0, double alpha, double gamma,
                             double T, int n_knots = 1000);

/// Member q_{t0} of the solution family: p0 until t0, then the heat
/// reconstruction driven by z(t - t0).
DensityField branch_solution(const DensityField& p0,
                             const EscapeProfile& profile, double t0, double t);

DensityField branch_solution(const DensityField& p0, double alpha, double gamma,
                             double t0, double t);

/// inf{t : mass of p0 on {|sigma + chi(t)| > 1} > 0}; infinity if never.
/// Throws ConfigError if D(p0) > 0.
double critical_time(const DensityField& p0, const ShearProtocol& protocol);

}  // namespace hl
