// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Reference values are independent closed forms or frozen numbers.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "hl/analytic.hpp"
#include "hl/degeneracy.hpp"
#include "hl/evolve.hpp"
#include "hl/steady.hpp"

using namespace hl;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
const auto g_start = std::chrono::steady_clock::now();

void report(int id, bool ok, const std::string& detail) {
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - g_start).count();
  std::printf("criterion %2d %s  %s  [%.1f s]\n", id, ok ? "PASS" : "FAIL", detail.c_str(),
              elapsed);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// Runs a criterion; an escaping exception is a failure with its message.
void guarded(int id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

// Least-squares slope of log(e) against log(h).
double fitted_order(const std::vector<double>& h, const std::vector<double>& e) {
  const int n = static_cast<int>(h.size());
  double mx = 0.0;
  double my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += std::log(h[i]);
    my += std::log(e[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (std::log(h[i]) - mx) * (std::log(h[i]) - mx);
    sxy += (std::log(h[i]) - mx) * (std::log(e[i]) - my);
  }
  return sxy / sxx;
}

// Random nonnegative step density inside [lo, hi], normalized. With pin the
// support starts exactly at lo.
DensityField random_density(const StressGrid& g, double lo, double hi, std::mt19937_64& rng,
                            bool pin) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double a = pin ? lo : lo + (hi - lo) * 0.5 * u(rng);
  const double b = hi - (hi - a) * 0.5 * u(rng);
  std::vector<double> v(g.n_cells(), 0.0);
  for (int i = 0; i < g.n_cells(); ++i) {
    if (g.edge(i) >= a && g.edge(i + 1) <= b) v[i] = u(rng) < 0.1 ? 0.0 : u(rng);
  }
  if (pin) v[static_cast<std::size_t>(std::lround((a + g.half_width()) * g.cells_per_unit()))] = 1.0;
  if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) v[g.n_cells() / 2] = 1.0;
  DensityField f(g, v);
  f.normalize();
  return f;
}

void criterion1() {
  const StressGrid g = StressGrid::build(8.0, 1600);
  const auto res = steady_zero_shear(1.0, g);
  if (!std::holds_alternative<SteadyState>(res)) {
    report(1, false, "alpha = 1 returned the degenerate family");
    return;
  }
  const SteadyState& s = std::get<SteadyState>(res);
  const double exact = 1.0 - std::sqrt(3.0) / 2.0;
  const double dd = std::abs(s.d_value - exact);
  const bool family = std::holds_alternative<DegenerateFamily>(steady_zero_shear(0.4, g));
  const bool ok = dd <= 1e-10 && std::abs(s.mass_defect) <= 1e-8 &&
                  std::abs(s.self_consistency_gap) <= 1e-8 && family;
  report(1, ok,
         fmt("|D-(1-sqrt3/2)|=%.2e mass_defect=%.2e gap=%.2e alpha=0.4 family=%s", dd,
             s.mass_defect, s.self_consistency_gap, family ? "yes" : "no"));
}

void criterion2() {
  const StressGrid g = StressGrid::build(32.0, 3200);
  const std::pair<double, double> cases[] = {{1.0, 1.0}, {1.0, 0.1}, {0.3, 1.0}, {2.0, 0.5}};
  double worst_res = 0.0;
  double worst_mass = 0.0;
  double worst_gap = 0.0;
  double worst_odd = 0.0;
  for (const auto& [alpha, b] : cases) {
    const SteadyState s = steady_sheared(alpha, b, g);
    const SteadyState m = steady_sheared(alpha, -b, g);
    worst_res = std::max(worst_res, s.norm_residual);
    worst_mass = std::max({worst_mass, std::abs(s.mass_defect), std::abs(m.mass_defect)});
    worst_gap = std::max({worst_gap, std::abs(s.self_consistency_gap),
                          std::abs(m.self_consistency_gap)});
    worst_odd = std::max(worst_odd, std::abs(s.tau + m.tau));
  }
  const StressGrid g8 = StressGrid::build(8.0, 1600);
  const double d0 = std::get<SteadyState>(steady_zero_shear(1.0, g8)).d_value;
  const double cont = std::abs(steady_sheared(1.0, 1e-4, g8).d_value - d0);
  const bool ok = worst_res <= 1e-10 && worst_mass <= 1e-8 && worst_gap <= 1e-8 &&
                  worst_odd <= 1e-8 && cont <= 1e-3;
  report(2, ok,
         fmt("norm_res=%.2e mass=%.2e gap=%.2e |tau(b)+tau(-b)|=%.2e |D(1e-4)-D(0)|=%.2e",
             worst_res, worst_mass, worst_gap, worst_odd, cont));
}

void criterion3() {
  const StressGrid g = StressGrid::build(8.0, 1600);
  const DensityField u = uniform_density(g, -1.0, 1.0);
  const DegeneracyReport r = classify(u, 1.0);
  double worst = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double x = std::pow(10.0, -6.0 + 8.0 * i / 200.0);
    const double c = f_uniform_closed(x, 1.0);
    worst = std::max(worst, std::abs(f_eval(u, x, 1.0) - c) / c);
  }
  const DegeneracyReport inner = classify(uniform_density(g, -0.5, 0.5), 1.0);
  const bool ok = r.verdict == Verdict::NonUnique && std::abs(r.small_x_exponent - 0.5) <= 0.05 &&
                  worst <= 1e-8 && inner.verdict == Verdict::Unique;
  report(3, ok,
         fmt("uniform=%s beta=%.4f max_rel|F-closed|=%.2e inner=%s", to_string(r.verdict),
             r.small_x_exponent, worst, to_string(inner.verdict)));
}

void criterion4() {
  std::mt19937_64 rng(20240601);
  const StressGrid g = StressGrid::build(4.0, 400);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  int compared = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const DensityField p0 = trial % 2 == 0 ? random_density(g, -1.0, 1.0, rng, true)
                                           : random_density(g, -0.9, 0.9, rng, false);
    double lo = 0.0;
    double hi = 0.0;
    p0.support(lo, hi);
    // Below gap^2 / 400 F is under e^-100 and both neighbours may be 0 in
    // double precision; the sample range stops there.
    const double gap = std::min(1.0 + lo, 1.0 - hi);
    const double lx0 = std::log10(std::max(1e-6, gap * gap / 400.0));
    std::vector<double> xs(50);
    for (double& x : xs) x = std::pow(10.0, lx0 + (2.0 - lx0) * u(rng));
    std::sort(xs.begin(), xs.end());
    double prev = f_eval(p0, xs[0], 1.0);
    for (std::size_t k = 1; k < xs.size(); ++k) {
      const double f = f_eval(p0, xs[k], 1.0);
      if (xs[k] > xs[k - 1]) {
        ++compared;
        if (!(f > prev)) ++violations;
      }
      prev = f;
    }
  }
  report(4, violations == 0, fmt("violations=%d of %d ordered pairs", violations, compared));
}

void criterion5() {
  const StressGrid g = StressGrid::build(8.0, 1600);
  const DensityField u = uniform_density(g, -1.0, 1.0);
  const double r0 = escape_profile(u, 1.0, 0.0, 1.0).ode_residual(u);
  const double r1 = escape_profile(u, 1.0, 1.0, 1.0).ode_residual(u);
  const double t = 1e-3;
  const EscapeProfile small = escape_profile(u, 1.0, 0.0, t, 10);
  const double law = std::pow(t / (2.0 * std::sqrt(M_PI)), 2.0);
  const double ratio = small.z().back() / law;
  const bool ok = r0 <= 1e-6 && r1 <= 1e-6 && std::abs(ratio - 1.0) <= 0.02;
  report(5, ok, fmt("residual gamma=0 %.2e gamma=1 %.2e z(1e-3)/law=%.6f", r0, r1, ratio));
}

// The Gaussian run shared by criteria 6 to 8.
Trajectory gaussian_run(int n_cells, double dt, int record_every) {
  const StressGrid g = StressGrid::build(16.0, n_cells);
  EvolveConfig c;
  c.dt = dt;
  c.horizon = 1.0;
  c.epsilon = 1e-3;
  c.record_every = record_every;
  return simulate(gaussian_density(g, 0.0, 2.0), ShearProtocol(), c, 1.0);
}

void criteria6to8() {
  const Trajectory tr = gaussian_run(1600, 1e-3, 1);
  const DensityField& p0 = tr.fields.front();
  const double T = tr.config.horizon;

  double mass_dev = 0.0;
  for (const TraceRecord& r : tr.trace) mass_dev = std::max(mass_dev, std::abs(r.mass - 1.0));
  double min_p = 0.0;
  double max_p = 0.0;
  for (const DensityField& f : tr.fields) {
    min_p = std::min(min_p, *std::min_element(f.values().begin(), f.values().end()));
    max_p = std::max(max_p, f.max_value());
  }
  const double bound = p0.max_value() + std::sqrt(tr.alpha / M_PI) * std::sqrt(T) + 1e-6;
  report(6, mass_dev <= 1e-6 && min_p >= 0.0 && max_p <= bound,
         fmt("max|mass-1|=%.2e over %zu steps (leakage %.2e) min p=%.2e max p=%.6f bound=%.6f",
             mass_dev, tr.trace.size(), tr.trace.back().leakage, min_p, max_p, bound));

  guarded(7, [&] {
    const double h = p0.grid().cell_width();
    // Envelopes every 10 steps on both grids: the same 101 times.
    const SandwichReport coarse = verify_sandwich(tr, 10);
    const double vc = std::max(coarse.max_lower, coarse.max_upper);
    const double tol = 5.0 * (tr.config.dt + h * h);
    const Trajectory fine = gaussian_run(3200, tr.config.dt / 4.0, 4);
    const SandwichReport sf = verify_sandwich(fine, 10);
    const double vf = std::max(sf.max_lower, sf.max_upper);
    const double hf = fine.fields.front().grid().cell_width();
    const double tol_f = 5.0 * (fine.config.dt + hf * hf);
    const bool ok = vc <= tol && vf <= tol_f && (vc == 0.0 ? vf == 0.0 : vf <= 0.5 * vc);
    report(7, ok,
           fmt("violation %.3e (tol %.2e) -> %.3e (tol %.2e) after dt/4, h/2; ratio %.2f", vc,
               tol, vf, tol_f, vf > 0.0 ? vc / vf : INFINITY));
  });

  guarded(8, [&] {
    const BoundsReport b = apriori_bounds(p0, tr.protocol, tr.alpha, T);
    double min_d = INFINITY;
    for (const TraceRecord& r : tr.trace) min_d = std::min(min_d, r.fluidity);
    report(8, min_d > b.nu && b.nu > 0.0, fmt("min D=%.6f nu=%.6f", min_d, b.nu));
  });
}

void criterion9() {
  const StressGrid g = StressGrid::build(8.0, 1600);
  const DensityField p0 = uniform_density(g, -0.5, 0.5);
  EvolveConfig c;
  c.dt = g.cell_width();  // b dt = dsigma with b = 1
  c.horizon = 1.0;
  c.epsilon = 0.0;
  c.record_every = 1;
  const Trajectory tr = simulate(p0, ShearProtocol::constant(1.0), c, 1.0);
  const double t_c = 0.5;
  double shift_dev = 0.0;
  double max_d = 0.0;
  int checked = 0;
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    if (!(tr.times[k] < t_c - 0.5 * c.dt)) continue;
    const int s = static_cast<int>(std::lround(tr.times[k] / c.dt));
    for (int i = 0; i < g.n_cells(); ++i) {
      const double expect = i - s >= 0 ? p0[i - s] : 0.0;
      shift_dev = std::max(shift_dev, std::abs(tr.fields[k][i] - expect));
    }
    max_d = std::max(max_d, tr.trace[k].fluidity);
    ++checked;
  }
  const double ts = stagnation_time(tr.trace);
  const bool ok = checked > 0 && shift_dev == 0.0 && max_d == 0.0 && std::abs(ts - t_c) <= c.dt;
  report(9, ok,
         fmt("%d snapshots before T_c: max|p - shifted p0|=%.1e max D=%.1e stagnation=%.4f",
             checked, shift_dev, max_d, ts));
}

void criterion10() {
  // Non-degenerate Gaussian data.
  const StressGrid g16 = StressGrid::build(16.0, 800);
  EvolveConfig c;
  c.dt = 2e-3;
  c.horizon = 1.0;
  const SweepReport gs =
      viscosity_sweep(gaussian_density(g16, 0.0, 2.0), ShearProtocol(), 1.0, {1e-2, 1e-3, 1e-4}, c);
  const bool decreasing = gs.successive.size() == 2 && gs.successive[1] < gs.successive[0];

  // Degenerate uniform data, reduced model, compared with the t0 = 0 branch
  // on t in [0.1, 1]. The threshold is the eps = 1e-3 vs 1e-4 gap on this
  // grid (measured 9.989e-3), rounded down and frozen as a regression value.
  constexpr double kFrozenThreshold = 9.98e-3;
  const StressGrid g8 = StressGrid::build(8.0, 1600);
  EvolveConfig r;
  r.dt = 1e-3;
  r.horizon = 1.0;
  r.terms.threshold_sink = false;
  r.terms.reinjection = false;
  const SweepReport ds = viscosity_sweep(uniform_density(g8, -1.0, 1.0), ShearProtocol(), 1.0,
                                         {1e-3, 1e-4}, r, 0.1);
  const bool branch = ds.reference == SweepReference::Branch && ds.to_reference.size() == 2;
  const double dist = branch ? ds.to_reference[1] : NAN;
  const double gap = ds.successive.empty() ? NAN : ds.successive[0];
  const bool ok = decreasing && branch && dist < kFrozenThreshold;
  report(10, ok,
         fmt("gaussian successive %.3e > %.3e; uniform d(eps=1e-4, branch)=%.3e threshold=%.2e "
             "(current eps gap %.3e)",
             gs.successive.size() > 0 ? gs.successive[0] : NAN,
             gs.successive.size() > 1 ? gs.successive[1] : NAN, dist, kFrozenThreshold, gap));
}

void criterion11() {
  std::vector<double> h0;
  std::vector<double> h1;
  std::vector<double> e0;
  std::vector<double> e1;
  for (int n : {800, 1600, 3200}) {
    const StressGrid gz = StressGrid::build(8.0, n);
    h0.push_back(gz.cell_width());
    e0.push_back(steady_residual(std::get<SteadyState>(steady_zero_shear(1.0, gz)), 1.0).defect_l2);
    // The sheared profile has an exponential tail: a wider window.
    const StressGrid gs = StressGrid::build(25.0, n);
    h1.push_back(gs.cell_width());
    e1.push_back(steady_residual(steady_sheared(1.0, 1.0, gs), 1.0).defect_l2);
  }
  const double k0 = fitted_order(h0, e0);
  const double k1 = fitted_order(h1, e1);
  report(11, k0 >= 1.7 && k1 >= 1.7,
         fmt("defect order zero shear %.3f (%.2e %.2e %.2e), b=1 %.3f (%.2e %.2e %.2e)", k0,
             e0[0], e0[1], e0[2], k1, e1[0], e1[1], e1[2]));
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(is), {});
}

void criterion12() {
  const fs::path work = fs::path(HL_WORK_DIR) / "acceptance_cli";
  fs::remove_all(work);
  int configs = 0;
  int files = 0;
  std::vector<std::string> problems;
  std::vector<fs::path> inis;
  for (const auto& e : fs::directory_iterator(HL_CONFIG_DIR)) {
    if (e.path().extension() == ".ini") inis.push_back(e.path());
  }
  std::sort(inis.begin(), inis.end());
  for (const fs::path& ini : inis) {
    const std::string scenario = ini.stem().string();
    ++configs;
    for (const char* run : {"a", "b"}) {
      const fs::path out = work / run / scenario;
      fs::create_directories(out);
      const std::string cmd = std::string("\"") + HL_HLAB + "\" " + scenario + " --config \"" +
                              ini.string() + "\" --out \"" + out.string() + "\" > \"" +
                              (out / "stdout.txt").string() + "\" 2>&1";
      if (std::system(cmd.c_str()) != 0) problems.push_back(scenario + " exit status");
    }
    const fs::path a = work / "a" / scenario;
    const fs::path b = work / "b" / scenario;
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename().string());
    std::vector<std::string> other;
    for (const auto& e : fs::directory_iterator(b)) other.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    std::sort(other.begin(), other.end());
    if (names != other) problems.push_back(scenario + " file sets differ");
    for (const std::string& n : names) {
      ++files;
      if (slurp(a / n) != slurp(b / n)) problems.push_back(scenario + "/" + n);
    }
  }
  std::string detail = fmt("%d configs, %d files compared", configs, files);
  for (const std::string& p : problems) detail += "; differs: " + p;
  report(12, configs > 0 && problems.empty(), detail);
}

}  // namespace

int main() {
  guarded(1, criterion1);
  guarded(2, criterion2);
  guarded(3, criterion3);
  guarded(4, criterion4);
  guarded(5, criterion5);
  try {
    criteria6to8();
  } catch (const std::exception& e) {
    report(6, false, std::string("exception: ") + e.what());
  }
  guarded(9, criterion9);
  guarded(10, criterion10);
  guarded(11, criterion11);
  guarded(12, criterion12);
  std::printf("%s: %d failing criteria\n", g_failures == 0 ? "ALL PASS" : "FAILURES", g_failures);
  return g_failures == 0 ? 0 : 1;
}
