#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hl/errors.hpp"
#include "hl/evolve.hpp"

using namespace hl;

TEST_CASE("one step keeps positivity and mass") {
  const StressGrid g = StressGrid::build(8.0, 800);
  const DensityField p0 = gaussian_density(g, 0.5, 1.0);
  const StepResult r = step(p0, 0.7, 1e-3, 1e-3, 1.0, 2);
  CHECK(std::all_of(r.field.values().begin(), r.field.values().end(),
                    [](double v) { return v >= 0.0; }));
  CHECK(r.field.mass() + r.leakage == doctest::Approx(p0.mass()).epsilon(1e-13));
  CHECK(r.sink_removed == doctest::Approx(r.source_added).epsilon(1e-12));
  CHECK(r.a_used > 1e-3);
  CHECK_THROWS_AS(step(p0, 100.0, 1e-3, 1e-3, 1.0, 1), ConfigError);
}

TEST_CASE("upwind transport at unit CFL is an exact shift") {
  const StressGrid g = StressGrid::build(4.0, 400);
  const DensityField p0 = uniform_density(g, -0.5, 0.5);
  Terms off;
  off.threshold_sink = false;
  off.reinjection = false;
  const double h = g.cell_width();
  const StepResult r = step(p0, 1.0, h, 0.0, 1.0, 1, off);
  for (int i = 1; i < g.n_cells(); ++i) CHECK(r.field[i] == p0[i - 1]);
}

TEST_CASE("reduced model: small-alpha diffusion matches the heat kernel") {
  const StressGrid g = StressGrid::build(8.0, 800);
  const DensityField p0 = uniform_density(g, -0.5, 0.5);
  EvolveConfig c;
  c.dt = 1e-3;
  c.horizon = 0.5;
  c.epsilon = 0.05;
  c.terms.threshold_sink = false;
  c.terms.reinjection = false;
  const Trajectory tr = simulate(p0, ShearProtocol(), c, 1e-12);
  const DensityField exact = smear(p0, std::sqrt(2.0 * c.epsilon * c.horizon), 0.0);
  CHECK(l2_distance(tr.fields.back(), exact) < 5e-3);
  CHECK(tr.fields.back().mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("uniform decay removes mass geometrically") {
  const StressGrid g = StressGrid::build(8.0, 800);
  const DensityField p0 = uniform_density(g, -0.5, 0.5);
  EvolveConfig c;
  c.dt = 1e-2;
  c.horizon = 1.0;
  c.epsilon = 1e-3;
  c.terms = {false, false, 2.0};
  const Trajectory tr = simulate(p0, ShearProtocol(), c, 1.0);
  CHECK(tr.trace.back().mass == doctest::Approx(std::pow(1.0 + 2.0 * c.dt, -100)).epsilon(1e-10));
}

TEST_CASE("simulate records histories and rejects bad configs") {
  const StressGrid g = StressGrid::build(8.0, 800);
  const DensityField p0 = gaussian_density(g, 0.0, 1.0);
  EvolveConfig c;
  c.dt = 1e-2;
  c.horizon = 0.5;
  c.record_every = 5;
  c.snapshot_times = {0.13};
  const Trajectory tr = simulate(p0, ShearProtocol::constant(0.5), c, 1.0);
  CHECK(tr.trace.size() == 51);
  CHECK(tr.trace.back().t == doctest::Approx(0.5));
  CHECK(tr.a_history.end_time() == doctest::Approx(0.5));
  CHECK(tr.dq_history.intervals() == 50);
  CHECK(std::find_if(tr.times.begin(), tr.times.end(),
                     [](double t) { return std::abs(t - 0.13) < 1e-12; }) != tr.times.end());
  CHECK(tr.trace.back().chi == doctest::Approx(0.25));
  CHECK(trajectory_distance(tr, tr, 0.0) == 0.0);

  c.horizon = 0.505;
  c.dt = 0.01;
  CHECK_THROWS_AS(simulate(p0, ShearProtocol(), c, 1.0), ConfigError);
  c.horizon = 0.5;
  CHECK_THROWS_AS(simulate(p0, ShearProtocol::constant(5.0), c, 1.0), ConfigError);
}

TEST_CASE("mass drift beyond tolerance is a numerical failure") {
  // A density near the wall leaks through the Dirichlet boundary.
  const StressGrid g = StressGrid::build(2.0, 200);
  const DensityField p0 = uniform_density(g, 1.5, 2.0);
  EvolveConfig c;
  c.dt = 1e-2;
  c.horizon = 0.5;
  c.epsilon = 0.1;
  CHECK_THROWS_AS(simulate(p0, ShearProtocol(), c, 1.0), NumericalError);
}

TEST_CASE("sandwich holds on a short run") {
  const StressGrid g = StressGrid::build(8.0, 800);
  const DensityField p0 = gaussian_density(g, 0.0, 1.0);
  EvolveConfig c;
  c.dt = 1e-3;
  c.horizon = 0.2;
  c.record_every = 50;
  const Trajectory tr = simulate(p0, ShearProtocol::constant(1.0), c, 1.0);
  const SandwichReport s = verify_sandwich(tr);
  CHECK(s.entries.size() == tr.times.size());
  CHECK(s.max_lower < 5.0 * (c.dt + g.cell_width() * g.cell_width()));
  CHECK(s.max_upper < 5.0 * (c.dt + g.cell_width() * g.cell_width()));
  const SandwichReport thin = verify_sandwich(tr, 3);
  CHECK(thin.entries.size() == 3);  // snapshots 0, 3 and the last (4)
  CHECK(thin.entries.back().t == tr.times.back());
  CHECK(thin.max_lower <= s.max_lower);
}

TEST_CASE("stagnation time reads the fluidity trace") {
  std::vector<TraceRecord> t(5);
  for (int k = 0; k < 5; ++k) t[k].t = 0.1 * k;
  CHECK(stagnation_time(t) == doctest::Approx(0.4));
  t[3].fluidity = 0.2;
  CHECK(stagnation_time(t) == doctest::Approx(0.2));
  t[0].fluidity = 1.0;
  CHECK(stagnation_time(t) == 0.0);
}

TEST_CASE("frozen steady solve annihilates the operator") {
  const StressGrid g = StressGrid::build(8.0, 800);
  for (Advection a : {Advection::Upwind, Advection::Centered}) {
    const DensityField p = solve_frozen_steady(g, 0.4, 0.6, 1.0, a);
    const std::vector<double> r = apply_operator(p, 0.4, 0.6, 1.0, a);
    double worst = 0.0;
    for (double v : r) worst = std::max(worst, std::abs(v));
    CHECK(worst < 1e-9);
    CHECK(*std::min_element(p.values().begin(), p.values().end()) >= 0.0);
  }
}

TEST_CASE("sweep on nondegenerate data orders the distances") {
  const StressGrid g = StressGrid::build(16.0, 800);
  const DensityField p0 = gaussian_density(g, 0.0, 2.0);
  EvolveConfig c;
  c.dt = 1e-2;
  c.horizon = 0.5;
  const SweepReport r = viscosity_sweep(p0, ShearProtocol(), 1.0, {1e-2, 1e-3, 1e-4}, c);
  REQUIRE(r.successive.size() == 2);
  CHECK(r.successive[1] < r.successive[0]);
  CHECK(r.monotone);
  CHECK(r.reference == SweepReference::None);
}
