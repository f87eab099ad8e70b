#pragma once

#include <vector>

#include "hl/analytic.hpp"
#include "hl/density.hpp"
#include "hl/shear.hpp"
#include "hl/trace.hpp"

namespace hl {

/// Which terms of the equation are active.
///
/// The default is the full model. Turning both the threshold sink and the
/// reinjection off, with an optional uniform decay gamma, gives the reduced
/// model dw/dt = D(w) w'' - gamma w.
struct Terms {
  bool threshold_sink = true;
  bool reinjection = true;
  double uniform_decay = 0.0;
};

struct EvolveConfig {
  double dt = 1e-3;
  double horizon = 1.0;
  double epsilon = 1e-3;
  int picard_iters = 1;
  int record_every = 10;
  std::vector<double> snapshot_times;  // stored in addition to the stride
  Terms terms;
  double tol_mass = 1e-6;  // |mass(t) - mass(0)| beyond this is a failure
};

struct StepResult {
  DensityField field;
  double a_used = 0.0;    // diffusion coefficient D + eps of the final sweep
  double d_source = 0.0;  // fluidity reinjected at 0 (end-of-step value)
  double sink_removed = 0.0;
  double source_added = 0.0;
  double leakage = 0.0;  // mass lost through sigma = +-L
};

/// One step of the scheme.
///
/// Upwind advection by b_now dt, then one implicit solve that couples
/// diffusion with coefficient D + eps, the sink on |sigma| > 1 and the
/// reinjection at 0, whose intensity is the end-of-step fluidity. The
/// coefficient D is lagged and refreshed by picard_iters - 1 extra sweeps.
/// The update is an M-matrix solve, so it preserves positivity and, apart
/// from leakage at +-L, mass. Throws ConfigError when |b_now| dt > dsigma.
StepResult step(const DensityField& field, double b_now, double dt,
                double epsilon, double alpha, int picard_iters,
                const Terms& terms = Terms());

struct TraceRecord {
  double t = 0.0;
  double fluidity = 0.0;  // D(p(t))
  double chi = 0.0;
  double tau = 0.0;
  double mass = 0.0;
  double max_p = 0.0;
  double leakage = 0.0;  // cumulative
};

struct Trajectory {
  ShearProtocol protocol;
  EvolveConfig config;
  double alpha = 1.0;
  std::vector<double> times;
  std::vector<DensityField> fields;
  std::vector<TraceRecord> trace;  // every step, starting at t = 0
  StepTrace a_history;             // D + eps used on each step
  StepTrace dq_history;            // reinjected fluidity on each step
};

/// Throws ConfigError for inconsistent configs (dt not dividing the
/// horizon, CFL) and NumericalError when mass drifts beyond tol_mass.
Trajectory simulate(const DensityField& p0, const ShearProtocol& protocol,
                    const EvolveConfig& config, double alpha);

struct SandwichEntry {
  double t = 0.0;
  double lower_violation = 0.0;  // max over cells of (lower - p)_+
  double upper_violation = 0.0;  // max over cells of (p - upper)_+
};

struct SandwichReport {
  std::vector<SandwichEntry> entries;
  double max_lower = 0.0;
  double max_upper = 0.0;
};

/// Envelopes rebuilt from the recorded histories at every stride-th stored
/// snapshot, the last one always included. Cost grows with snapshots times
/// recorded steps.
SandwichReport verify_sandwich(const Trajectory& traj, int stride = 1);

enum class SweepReference { None, Branch, Steady };

struct SweepReport {
  std::vector<double> eps;
  std::vector<double> successive;  // d(p_eps[k], p_eps[k+1])
  bool monotone = false;
  SweepReference reference = SweepReference::None;
  std::vector<double> to_reference;  // d(p_eps[k], reference), if any
  double t_from = 0.0;
};

/// L2 distance over [t_from, T] x [-L, L], trapezoidal in the stored times.
double trajectory_distance(const Trajectory& a, const Trajectory& b,
                           double t_from);

/// Runs one simulation per eps concurrently and compares successive runs.
///
/// For degenerate data at zero shear the runs are also compared with the
/// steady state p0 (Unique verdict) or, for the reduced model, with the
/// branch started at t0 = 0 (NonUnique verdict).
SweepReport viscosity_sweep(const DensityField& p0,
                            const ShearProtocol& protocol, double alpha,
                            const std::vector<double>& eps_list,
                            const EvolveConfig& base, double t_from = 0.0);

/// sup{t : integral_0^t D = 0}, reading the recorded D as piecewise linear.
/// Returns 0 if D(0) > 0 and the last recorded time if D never activates.
double stagnation_time(const std::vector<TraceRecord>& trace);

enum class Advection { Upwind, Centered };

/// D p'' - b p' - 1_{|sigma|>1} p + (D / alpha) delta_0 on the grid, with
/// frozen D and b and zero Dirichlet data at +-L.
std::vector<double> apply_operator(const DensityField& p, double D, double b,
                                   double alpha, Advection scheme);

/// Discrete solution of apply_operator(p) = 0 for frozen D and b.
DensityField solve_frozen_steady(const StressGrid& grid, double D, double b,
                                 double alpha, Advection scheme);

}  // namespace hl
