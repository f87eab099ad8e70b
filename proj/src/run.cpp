#include "hl/run.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <variant>

#include "hl/analytic.hpp"
#include "hl/degeneracy.hpp"
#include "hl/errors.hpp"
#include "hl/evolve.hpp"
#include "hl/steady.hpp"

namespace hl {

using nlohmann::json;

namespace {

// JSON has no infinity; +inf becomes the string "infinity".
json number_or_marker(double x) {
  if (std::isinf(x)) return x > 0 ? json("infinity") : json("-infinity");
  if (std::isnan(x)) return json(nullptr);
  return json(x);
}

class Writer {
 public:
  Writer(const std::filesystem::path& dir, RunResult& result) : dir_(dir), result_(result) {}

  void text(const std::string& name, const std::string& body) {
    const std::filesystem::path p = dir_ / name;
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError("cannot open '" + p.string() + "' for writing");
    os << body;
    if (!os) throw ConfigError("failed writing '" + p.string() + "'");
    result_.files.push_back(name);
  }

  void csv(const std::string& name, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& rows) {
    std::string s;
    for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
    s += "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + format_double(row[i]);
      s += "\n";
    }
    text(name, s);
  }

  void profile(const std::string& name, const DensityField& f) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < f.size(); ++i) rows.push_back({f.grid().center(i), f[i]});
    csv(name, {"sigma", "p"}, rows);
  }

  void json_file(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }

 private:
  std::filesystem::path dir_;
  RunResult& result_;
};

void run_evolve(const RunConfig& c, const DensityField& p0, Writer& w) {
  const double alpha = c.params.alpha;
  const Trajectory tr = simulate(p0, c.protocol, c.evolve, alpha);
  std::vector<std::vector<double>> rows;
  double min_d = tr.trace.front().fluidity;
  double max_p = 0.0;
  for (const TraceRecord& r : tr.trace) {
    rows.push_back({r.t, r.fluidity, r.tau, r.mass, r.max_p, r.chi, r.leakage});
    min_d = std::min(min_d, r.fluidity);
    max_p = std::max(max_p, r.max_p);
  }
  w.csv("trace.csv", {"t", "D", "tau", "mass", "maxp", "chi", "leakage"}, rows);

  json snaps = json::array();
  for (std::size_t i = 0; i < c.evolve.snapshot_times.size(); ++i) {
    const double ts = c.evolve.snapshot_times[i];
    std::size_t best = 0;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      if (std::abs(tr.times[k] - ts) < std::abs(tr.times[best] - ts)) best = k;
    }
    const std::string name = "profile_" + std::to_string(i) + ".csv";
    w.profile(name, tr.fields[best]);
    snaps.push_back({{"file", name}, {"t", tr.times[best]}});
  }
  w.profile("profile_final.csv", tr.fields.back());

  const BoundsReport b = apriori_bounds(p0, c.protocol, alpha, c.evolve.horizon);
  json s;
  s["stagnation_time"] = stagnation_time(tr.trace);
  s["min_fluidity"] = min_d;
  s["max_density"] = max_p;
  s["final_mass"] = tr.trace.back().mass;
  s["leakage"] = tr.trace.back().leakage;
  s["snapshots"] = snaps;
  s["bounds"] = {{"nu1", b.nu1},
                 {"nu2", number_or_marker(b.nu2)},
                 {"nu", b.nu},
                 {"linf_bound", b.linf_bound},
                 {"c1", b.c1},
                 {"c2", b.c2},
                 {"c3", b.c3},
                 {"t_star", number_or_marker(b.t_star_input)},
                 {"degenerate", b.degenerate}};
  w.json_file("summary.json", s);
}

json steady_json(const SteadyState& s, const SteadyDefect& d) {
  return {{"D", s.d_value},
          {"b", s.b_value},
          {"tau", s.tau},
          {"normalization_residual", s.norm_residual},
          {"mass_defect", s.mass_defect},
          {"self_consistency_gap", s.self_consistency_gap},
          {"truncated_mass", s.truncated_mass},
          {"operator_residual_l2", d.residual_l2},
          {"operator_defect_l2", d.defect_l2},
          {"degenerate_family", false}};
}

void run_steady(const RunConfig& c, const StressGrid& grid, Writer& w) {
  const double alpha = c.params.alpha;
  if (c.steady_shear == 0.0) {
    const auto res = steady_zero_shear(alpha, grid);
    if (const auto* fam = std::get_if<DegenerateFamily>(&res)) {
      w.json_file("steady.json",
                  {{"degenerate_family", true}, {"alpha", fam->alpha}, {"reason", fam->reason}});
      return;
    }
    const SteadyState& s = std::get<SteadyState>(res);
    w.profile("profile.csv", s.profile);
    w.json_file("steady.json", steady_json(s, steady_residual(s, alpha)));
    return;
  }
  const SteadyState s = steady_sheared(alpha, c.steady_shear, grid, c.params.tol_root);
  w.profile("profile.csv", s.profile);
  w.json_file("steady.json", steady_json(s, steady_residual(s, alpha)));
}

void run_flowcurve(const RunConfig& c, const StressGrid& grid, Writer& w) {
  const FlowCurve fc = flow_curve(c.params.alpha, c.flow_shears, grid, c.params.tol_root);
  std::vector<std::vector<double>> rows;
  for (const FlowPoint& p : fc.points) rows.push_back({p.b, p.d_value, p.tau});
  w.csv("flowcurve.csv", {"b", "D", "tau"}, rows);
  w.json_file("flowcurve.json", {{"max_odd_defect", fc.max_odd_defect}, {"has_pairs", fc.has_pairs}});
}

const char* verdict_label(Verdict v) {
  switch (v) {
    case Verdict::Unique:
      return "unique";
    case Verdict::NonUnique:
      return "non-unique";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

void run_degeneracy(const RunConfig& c, const DensityField& p0, Writer& w) {
  const double alpha = c.params.alpha;
  const DegeneracyReport r = classify(p0, alpha, c.protocol);
  json j;
  j["verdict"] = verdict_label(r.verdict);
  j["criterion_integral"] = r.criterion_integral ? json(*r.criterion_integral)
                            : r.verdict == Verdict::Unique ? json("divergent")
                                                           : json("undetermined");
  j["small_x_exponent"] = number_or_marker(r.small_x_exponent);
  j["fit_residual"] = r.fit_residual;
  j["super_power_decay"] = r.super_power_decay;
  j["t_c"] = number_or_marker(r.t_c);
  j["reason"] = r.reason;
  if (r.verdict == Verdict::NonUnique) {
    const EscapeProfile ep = escape_profile(p0, alpha, c.degeneracy_gamma, c.degeneracy_horizon,
                                            c.degeneracy_knots);
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < ep.times().size(); ++k) {
      rows.push_back({ep.times()[k], ep.z()[k], ep.rate()[k]});
    }
    w.csv("escape.csv", {"t", "z", "rate"}, rows);
    // Finite-difference check of z' = exp(-gamma t) F(z) on the table; it
    // also carries the truncation error of the difference stencil.
    const double res = ep.ode_residual(p0);
    j["escape_ode_residual"] = res;
    j["escape_ode_within_tol"] = res <= c.params.tol_ode;
  }
  w.json_file("degeneracy.json", j);
}

void run_sweep(const RunConfig& c, const DensityField& p0, Writer& w) {
  const SweepReport r =
      viscosity_sweep(p0, c.protocol, c.params.alpha, c.sweep_eps, c.evolve, c.sweep_t_from);
  const double nan = std::nan("");
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < r.eps.size(); ++k) {
    rows.push_back({r.eps[k], k < r.successive.size() ? r.successive[k] : nan,
                    k < r.to_reference.size() ? r.to_reference[k] : nan});
  }
  w.csv("sweep.csv", {"eps", "distance_to_next", "distance_to_reference"}, rows);
  const char* ref = r.reference == SweepReference::Branch   ? "branch"
                    : r.reference == SweepReference::Steady ? "steady"
                                                            : "none";
  w.json_file("sweep.json", {{"monotone", r.monotone}, {"reference", ref}, {"t_from", r.t_from}});
}

}  // namespace

DensityField load_density_csv(const std::filesystem::path& path, const StressGrid& grid) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read initial condition file '" + path.string() + "'");
  std::string line;
  std::getline(is, line);
  std::vector<double> xs;
  std::vector<double> ps;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    double x = 0.0;
    double p = 0.0;
    char comma = 0;
    if (!(ls >> x >> comma >> p) || comma != ',' || !std::isfinite(x) || !std::isfinite(p)) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected 'sigma,p'");
    }
    if (p < 0.0) throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": negative density");
    if (!xs.empty() && !(x > xs.back())) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": sigma must increase");
    }
    xs.push_back(x);
    ps.push_back(p);
  }
  if (xs.size() < 2) throw ConfigError(path.string() + ": need at least two samples");
  auto f = [&](double s) {
    if (s <= xs.front() || s >= xs.back()) return 0.0;
    const auto it = std::upper_bound(xs.begin(), xs.end(), s);
    const std::size_t k = static_cast<std::size_t>(it - xs.begin());
    const double u = (s - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return (1.0 - u) * ps[k - 1] + u * ps[k];
  };
  return project(grid, f);
}

DensityField build_initial(const RunConfig& c, const StressGrid& grid, double& renormalization) {
  const InitialSpec& ic = c.initial;
  DensityField f(grid);
  if (ic.kind == "uniform") {
    f = uniform_density(grid, ic.a, ic.b);
  } else if (ic.kind == "gaussian") {
    f = gaussian_density(grid, ic.mean, ic.width);
  } else if (ic.kind == "steady") {
    if (ic.shear == 0.0) {
      const auto res = steady_zero_shear(c.params.alpha, grid);
      if (!std::holds_alternative<SteadyState>(res)) {
        throw ConfigError("zero-shear steady initial condition needs alpha > 1/2");
      }
      f = std::get<SteadyState>(res).profile;
    } else {
      f = steady_sheared(c.params.alpha, ic.shear, grid, c.params.tol_root).profile;
    }
  } else if (ic.kind == "file") {
    f = load_density_csv(ic.path, grid);
  } else {
    throw ConfigError("unknown initial condition kind '" + ic.kind + "'");
  }
  renormalization = f.normalize();
  return f;
}

RunResult run(const RunConfig& c, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + out_dir.string() + "'");
  RunResult result;
  Writer w(out_dir, result);
  const StressGrid grid = StressGrid::build(c.params.half_width, c.params.n_cells);

  const bool needs_initial = c.scenario == Scenario::Evolve || c.scenario == Scenario::Sweep ||
                             c.scenario == Scenario::Degeneracy;
  std::optional<DensityField> p0;
  if (needs_initial) {
    p0 = build_initial(c, grid, result.renormalization);
    if (result.renormalization != 1.0) {
      std::clog << "initial condition rescaled to unit mass by factor "
                << format_double(result.renormalization) << "\n";
    }
  }

  try {
    switch (c.scenario) {
      case Scenario::Evolve:
        run_evolve(c, *p0, w);
        break;
      case Scenario::Steady:
        run_steady(c, grid, w);
        break;
      case Scenario::FlowCurve:
        run_flowcurve(c, grid, w);
        break;
      case Scenario::Degeneracy:
        run_degeneracy(c, *p0, w);
        break;
      case Scenario::Sweep:
        run_sweep(c, *p0, w);
        break;
    }
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(to_string(c.scenario)) + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(to_string(c.scenario)) + ": " + e.what());
  }

  const std::string ini = c.canonical_ini();
  json m;
  m["program"] = "hlab";
  m["format_version"] = 1;
  m["scenario"] = to_string(c.scenario);
  m["config"] = ini;
  m["initial_renormalization"] = result.renormalization;
  m["outputs"] = result.files;
  w.text("manifest.ini", ini);
  w.json_file("manifest.json", m);
  return result;
}

}  // namespace hl
