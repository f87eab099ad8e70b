#include "hl/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "hl/degeneracy.hpp"
#include "hl/errors.hpp"
#include "hl/tridiagonal.hpp"

namespace hl {

namespace {

double outside_sum(const std::vector<double>& v, const StressGrid& g) {
  double s = 0.0;
  for (int i = 0; i < g.inner_begin(); ++i) s += v[i];
  for (int i = g.inner_end(); i < g.n_cells(); ++i) s += v[i];
  return s;
}

double total(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

struct Bands {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;
};

// Rows of D p'' - (advective flux difference) - sink, zero face value at +-L.
Bands spatial_bands(const StressGrid& g, double D, double b, Advection scheme) {
  const int n = g.n_cells();
  const double h = g.cell_width();
  const double r = D / (h * h);
  Bands m{std::vector<double>(n, r), std::vector<double>(n, -2.0 * r),
          std::vector<double>(n, r)};
  m.diag.front() -= r;
  m.diag.back() -= r;
  for (int i = 0; i < n; ++i) {
    if (g.outside_threshold(i)) m.diag[i] -= 1.0;
    if (scheme == Advection::Upwind) {
      if (b > 0.0) {
        m.diag[i] -= b / h;
        m.lower[i] += b / h;
      } else if (b < 0.0) {
        m.diag[i] += b / h;
        m.upper[i] -= b / h;
      }
    } else {
      const double q = b / (2.0 * h);
      m.upper[i] -= q;
      m.lower[i] += q;
    }
  }
  if (scheme == Advection::Centered) {
    m.diag.front() -= b / (2.0 * h);
    m.diag.back() += b / (2.0 * h);
  }
  return m;
}

std::vector<double> source_vector(const StressGrid& g, double D, double alpha) {
  std::vector<double> s(g.n_cells(), 0.0);
  const double v = D / alpha / (2.0 * g.cell_width());
  s[g.source_left()] = v;
  s[g.source_right()] = v;
  return s;
}

}  // namespace

StepResult step(const DensityField& field, double b_now, double dt,
                double epsilon, double alpha, int picard_iters,
                const Terms& terms) {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (picard_iters < 1) throw ConfigError("picard_iters must be at least 1");
  const StressGrid& g = field.grid();
  const int n = g.n_cells();
  const double h = g.cell_width();
  const double c = b_now * dt / h;
  if (std::abs(c) > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "CFL violated: |b| dt = " << std::abs(b_now) * dt
       << " exceeds dsigma = " << h << "; use dt <= " << h / std::abs(b_now);
    throw ConfigError(os.str());
  }
  const std::vector<double>& p = field.values();
  const double mass_before = total(p) * h;

  // Upwind transport with zero inflow.
  std::vector<double> adv(p);
  if (c > 0.0) {
    for (int i = 0; i < n; ++i) adv[i] = p[i] - c * (p[i] - (i > 0 ? p[i - 1] : 0.0));
  } else if (c < 0.0) {
    const double a = -c;
    for (int i = 0; i < n; ++i) adv[i] = p[i] - a * (p[i] - (i + 1 < n ? p[i + 1] : 0.0));
  }
  for (double& x : adv) x = std::max(x, 0.0);

  std::vector<double> unit_source(n, 0.0);
  unit_source[g.source_left()] = 0.5 / h;
  unit_source[g.source_right()] = 0.5 / h;

  double a = fluidity(p, g, alpha) + epsilon;
  std::vector<double> out;
  double d_src = 0.0;
  for (int it = 0; it < picard_iters; ++it) {
    const double r = dt * a / (h * h);
    std::vector<double> lower(n, -r);
    std::vector<double> upper(n, -r);
    std::vector<double> diag(n, 1.0 + 2.0 * r + dt * terms.uniform_decay);
    diag.front() += r;
    diag.back() += r;
    if (terms.threshold_sink) {
      for (int i = 0; i < n; ++i) {
        if (g.outside_threshold(i)) diag[i] += dt;
      }
    }
    const TridiagonalSolver solver(lower, diag, upper);
    out = solver.solve(adv);
    d_src = 0.0;
    if (terms.reinjection) {
      const std::vector<double> v = solver.solve(unit_source);
      const double su = h * outside_sum(out, g);
      const double sv = h * outside_sum(v, g);
      d_src = alpha * su / (1.0 - dt * sv);
      const double w = dt * d_src / alpha;
      for (int i = 0; i < n; ++i) out[i] += w * v[i];
    }
    for (double& x : out) x = std::max(x, 0.0);
    if (it + 1 < picard_iters) a = fluidity(out, g, alpha) + epsilon;
  }

  StepResult res{DensityField(g, std::move(out)), a, d_src, 0.0, 0.0, 0.0};
  const std::vector<double>& q = res.field.values();
  res.sink_removed = terms.threshold_sink ? dt * h * outside_sum(q, g) : 0.0;
  res.source_added = terms.reinjection ? dt * d_src / alpha : 0.0;
  const double decayed = dt * terms.uniform_decay * h * total(q);
  res.leakage = mass_before - total(q) * h - res.sink_removed + res.source_added - decayed;
  return res;
}

Trajectory simulate(const DensityField& p0, const ShearProtocol& protocol,
                    const EvolveConfig& config, double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!(config.dt > 0.0) || !(config.horizon > 0.0)) {
    throw ConfigError("dt and horizon must be positive");
  }
  if (!(config.epsilon >= 0.0)) throw ConfigError("epsilon must be nonnegative");
  if (config.record_every < 1) throw ConfigError("record_every must be at least 1");
  const long steps = std::lround(config.horizon / config.dt);
  if (steps < 1 || std::abs(steps * config.dt - config.horizon) > 1e-9 * config.horizon) {
    std::ostringstream os;
    os << "dt = " << config.dt << " does not divide the horizon " << config.horizon;
    throw ConfigError(os.str());
  }
  const double h = p0.grid().cell_width();
  const double bmax = protocol.max_abs_b();
  if (bmax * config.dt > h * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "CFL violated: max |b| dt = " << bmax * config.dt << " exceeds dsigma = " << h
       << "; use dt <= " << h / bmax;
    throw ConfigError(os.str());
  }

  std::vector<long> wanted;
  for (double ts : config.snapshot_times) {
    if (ts < 0.0 || ts > config.horizon * (1 + 1e-12)) {
      throw ConfigError("snapshot time outside [0, horizon]");
    }
    wanted.push_back(std::lround(ts / config.dt));
  }

  Trajectory tr;
  tr.protocol = protocol;
  tr.config = config;
  tr.alpha = alpha;

  auto record = [&](double t, const DensityField& f, double leak) {
    const Observables o = observables(f, alpha);
    tr.trace.push_back({t, o.fluidity, protocol.chi(t), o.mean_stress, o.mass, f.max_value(), leak});
  };
  auto store = [&](long k, double t, const DensityField& f) {
    const bool stride = k % config.record_every == 0 || k == steps;
    const bool asked = std::find(wanted.begin(), wanted.end(), k) != wanted.end();
    if (stride || asked) {
      tr.times.push_back(t);
      tr.fields.push_back(f);
    }
  };

  DensityField cur = p0;
  double leak = 0.0;
  record(0.0, cur, 0.0);
  store(0, 0.0, cur);
  for (long k = 0; k < steps; ++k) {
    const double t0 = k * config.dt;
    const double t1 = (k + 1) * config.dt;
    const double b_now = protocol.mean_rate(t0, t1);
    StepResult s = step(cur, b_now, config.dt, config.epsilon, alpha, config.picard_iters,
                        config.terms);
    leak += s.leakage;
    if (std::abs(leak) > config.tol_mass) {
      std::ostringstream os;
      os << "mass leaked through the domain boundary exceeds tol_mass at t = " << t1
         << " (" << leak << "); enlarge half_width";
      throw NumericalError(os.str());
    }
    tr.a_history.append(t1, s.a_used);
    tr.dq_history.append(t1, s.d_source);
    cur = std::move(s.field);
    record(t1, cur, leak);
    store(k + 1, t1, cur);
  }
  return tr;
}

SandwichReport verify_sandwich(const Trajectory& traj, int stride) {
  if (stride < 1) throw ConfigError("verify_sandwich needs stride >= 1");
  SandwichReport rep;
  const DensityField& p0 = traj.fields.front();
  const std::size_t last = traj.fields.size() - 1;
  for (std::size_t k = 0; k <= last; ++k) {
    if (k % static_cast<std::size_t>(stride) != 0 && k != last) continue;
    const double t = traj.times[k];
    const EnvelopePair env =
        envelopes(p0, traj.a_history, traj.dq_history, traj.protocol, t, traj.alpha);
    SandwichEntry e{t, 0.0, 0.0};
    const DensityField& p = traj.fields[k];
    for (int i = 0; i < p.size(); ++i) {
      e.lower_violation = std::max(e.lower_violation, env.lower[i] - p[i]);
      e.upper_violation = std::max(e.upper_violation, p[i] - env.upper[i]);
    }
    rep.max_lower = std::max(rep.max_lower, e.lower_violation);
    rep.max_upper = std::max(rep.max_upper, e.upper_violation);
    rep.entries.push_back(e);
  }
  return rep;
}

namespace {

template <class FieldAt>
double windowed_l2(const std::vector<double>& times, double t_from, FieldAt diff_sq) {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    if (times[k] < t_from - 1e-12) continue;
    const double w = 0.5 * (times[k + 1] - times[k]);
    s += w * (diff_sq(k) + diff_sq(k + 1));
  }
  return std::sqrt(s);
}

}  // namespace

double trajectory_distance(const Trajectory& a, const Trajectory& b, double t_from) {
  if (a.times.size() != b.times.size()) throw ConfigError("trajectories stored at different times");
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    if (std::abs(a.times[k] - b.times[k]) > 1e-12) {
      throw ConfigError("trajectories stored at different times");
    }
  }
  return windowed_l2(a.times, t_from, [&](std::size_t k) {
    const double d = l2_distance(a.fields[k], b.fields[k]);
    return d * d;
  });
}

SweepReport viscosity_sweep(const DensityField& p0, const ShearProtocol& protocol,
                            double alpha, const std::vector<double>& eps_list,
                            const EvolveConfig& base, double t_from) {
  if (eps_list.empty()) throw ConfigError("eps_list is empty");
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    if (!(eps_list[k] > 0.0)) throw ConfigError("eps_list entries must be positive");
    if (k > 0 && !(eps_list[k] < eps_list[k - 1])) {
      throw ConfigError("eps_list must be strictly decreasing");
    }
  }
  std::vector<std::future<Trajectory>> jobs;
  for (double eps : eps_list) {
    EvolveConfig cfg = base;
    cfg.epsilon = eps;
    jobs.push_back(std::async(std::launch::async,
                              [&p0, &protocol, cfg, alpha] { return simulate(p0, protocol, cfg, alpha); }));
  }
  std::vector<Trajectory> runs;
  for (auto& j : jobs) runs.push_back(j.get());

  SweepReport rep;
  rep.eps = eps_list;
  rep.t_from = t_from;
  for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
    rep.successive.push_back(trajectory_distance(runs[k], runs[k + 1], t_from));
  }
  rep.monotone = true;
  for (std::size_t k = 1; k < rep.successive.size(); ++k) {
    rep.monotone = rep.monotone && rep.successive[k] < rep.successive[k - 1];
  }

  const bool degenerate = fluidity(p0.values(), p0.grid(), alpha) == 0.0;
  if (!degenerate || !protocol.identically_zero()) return rep;
  const DegeneracyReport cls = classify(p0, alpha);
  const std::vector<double>& times = runs.front().times;
  std::vector<DensityField> ref;
  if (cls.verdict == Verdict::Unique) {
    rep.reference = SweepReference::Steady;
    ref.assign(times.size(), p0);
  } else if (cls.verdict == Verdict::NonUnique && !base.terms.threshold_sink &&
             !base.terms.reinjection) {
    rep.reference = SweepReference::Branch;
    const EscapeProfile ep = escape_profile(p0, alpha, base.terms.uniform_decay, base.horizon);
    for (double t : times) ref.push_back(branch_solution(p0, ep, 0.0, t));
  } else {
    return rep;
  }
  for (const Trajectory& r : runs) {
    rep.to_reference.push_back(windowed_l2(times, t_from, [&](std::size_t k) {
      const double d = l2_distance(r.fields[k], ref[k]);
      return d * d;
    }));
  }
  return rep;
}

double stagnation_time(const std::vector<TraceRecord>& trace) {
  if (trace.empty()) throw ConfigError("stagnation_time needs a nonempty trace");
  if (trace.front().fluidity > 0.0) return trace.front().t;
  for (std::size_t k = 1; k < trace.size(); ++k) {
    if (trace[k].fluidity > 0.0) return trace[k - 1].t;
  }
  return trace.back().t;
}

std::vector<double> apply_operator(const DensityField& p, double D, double b,
                                   double alpha, Advection scheme) {
  const StressGrid& g = p.grid();
  const Bands m = spatial_bands(g, D, b, scheme);
  std::vector<double> r = source_vector(g, D, alpha);
  const int n = g.n_cells();
  for (int i = 0; i < n; ++i) {
    r[i] += m.diag[i] * p[i];
    if (i > 0) r[i] += m.lower[i] * p[i - 1];
    if (i + 1 < n) r[i] += m.upper[i] * p[i + 1];
  }
  return r;
}

DensityField solve_frozen_steady(const StressGrid& grid, double D, double b,
                                 double alpha, Advection scheme) {
  if (!(D > 0.0)) throw ConfigError("frozen steady solve needs D > 0");
  const Bands m = spatial_bands(grid, D, b, scheme);
  std::vector<double> rhs = source_vector(grid, D, alpha);
  for (double& x : rhs) x = -x;
  const TridiagonalSolver solver(m.lower, m.diag, m.upper);
  std::vector<double> p = solver.solve(rhs);
  for (double& x : p) {
    if (x < 0.0) {
      if (x < -1e-12) throw NumericalError("frozen steady solve lost positivity");
      x = 0.0;
    }
  }
  return DensityField(grid, std::move(p));
}

}  // namespace hl
