#include "hl/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "hl/errors.hpp"
#include "hl/grid.hpp"

namespace hl {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"run", {"scenario"}},
      {"model",
       {"alpha", "epsilon", "half_width", "n_cells", "tol_mass", "tol_root", "tol_ode",
        "degenerate_mode"}},
      {"initial", {"kind", "a", "b", "mean", "width", "shear", "path"}},
      {"shear", {"rate", "pieces"}},
      {"evolve",
       {"dt", "horizon", "picard_iters", "record_every", "snapshot_times", "threshold_sink",
        "reinjection", "decay"}},
      {"steady", {"shear"}},
      {"flowcurve", {"shears"}},
      {"sweep", {"epsilons", "t_from"}},
      {"degeneracy", {"gamma", "horizon", "knots"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Reads typed values, collecting one diagnostic per problem.
class Reader {
 public:
  Reader(const pt::ptree& tree, std::vector<std::string>& diag) : tree_(tree), diag_(diag) {}

  bool has_section(const std::string& s) const { return tree_.get_child_optional(s).has_value(); }

  std::optional<std::string> raw(const std::string& key) const {
    auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!v || trim(*v).empty()) return std::nullopt;  // "key =" leaves the default
    return trim(*v);
  }

  double number(const std::string& key, double fallback) {
    auto v = raw(key);
    if (!v) return fallback;
    double x = 0.0;
    if (!parse_double(*v, x)) {
      diag_.push_back(key + ": '" + *v + "' is not a number");
      return fallback;
    }
    return x;
  }

  int integer(const std::string& key, int fallback) {
    auto v = raw(key);
    if (!v) return fallback;
    int x = 0;
    const auto* end = v->data() + v->size();
    auto [p, ec] = std::from_chars(v->data(), end, x);
    if (ec != std::errc() || p != end) {
      diag_.push_back(key + ": '" + *v + "' is not an integer");
      return fallback;
    }
    return x;
  }

  bool boolean(const std::string& key, bool fallback) {
    auto v = raw(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    diag_.push_back(key + ": '" + *v + "' is not a boolean (true/false)");
    return fallback;
  }

  std::vector<double> numbers(const std::string& key) {
    std::vector<double> out;
    auto v = raw(key);
    if (!v) return out;
    for (const std::string& item : split(*v, ',')) {
      double x = 0.0;
      if (!parse_double(item, x)) {
        diag_.push_back(key + ": list entry '" + item + "' is not a number");
      } else {
        out.push_back(x);
      }
    }
    return out;
  }

  static bool parse_double(const std::string& s, double& x) {
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, x);
    return ec == std::errc() && p == end && std::isfinite(x);
  }

 private:
  const pt::ptree& tree_;
  std::vector<std::string>& diag_;
};

std::string join_numbers(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) s += ", ";
    s += format_double(v[i]);
  }
  return s;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::Evolve:
      return "evolve";
    case Scenario::Steady:
      return "steady";
    case Scenario::FlowCurve:
      return "flowcurve";
    case Scenario::Degeneracy:
      return "degeneracy";
    case Scenario::Sweep:
      return "sweep";
  }
  return "evolve";
}

Scenario parse_scenario(const std::string& name) {
  for (Scenario s : {Scenario::Evolve, Scenario::Steady, Scenario::FlowCurve,
                     Scenario::Degeneracy, Scenario::Sweep}) {
    if (name == to_string(s)) return s;
  }
  throw ConfigError("unknown scenario '" + name +
                    "' (expected evolve, steady, flowcurve, degeneracy or sweep)");
}

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides,
                       const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config syntax error at line " + std::to_string(e.line()) + ": " +
                      e.message());
  }

  std::vector<std::string> diag;
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (!body.data().empty() && body.empty()) {
      diag.push_back("key '" + section + "' outside any section");
      continue;
    }
    if (it == known_keys().end()) {
      diag.push_back("unknown section [" + section + "]");
      continue;
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) diag.push_back("unknown key '" + key + "' in [" + section + "]");
    }
  }

  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    const std::string key = trim(ov.substr(0, eq));
    const auto dot = key.find('.');
    if (eq == std::string::npos || dot == std::string::npos) {
      diag.push_back("override '" + ov + "' is not of the form section.key=value");
      continue;
    }
    const std::string section = key.substr(0, dot);
    const std::string name = key.substr(dot + 1);
    const auto it = known_keys().find(section);
    if (it == known_keys().end() || !it->second.count(name)) {
      diag.push_back("override names unknown key '" + key + "'");
      continue;
    }
    const std::string value = trim(ov.substr(eq + 1));
    if (key == "run.scenario") {
      auto old = tree.get_optional<std::string>("run.scenario");
      if (old && trim(*old) != value) {
        diag.push_back("config declares scenario '" + trim(*old) + "' but '" + value +
                       "' was requested");
      }
    }
    tree.put(pt::ptree::path_type(key, '.'), value);
  }

  Reader r(tree, diag);
  RunConfig c;
  c.base_dir = base_dir;

  if (auto s = r.raw("run.scenario")) {
    try {
      c.scenario = parse_scenario(*s);
    } catch (const ConfigError& e) {
      diag.push_back(e.what());
    }
  }

  ModelParams& m = c.params;
  m.alpha = r.number("model.alpha", m.alpha);
  m.epsilon = r.number("model.epsilon", m.epsilon);
  m.half_width = r.number("model.half_width", m.half_width);
  m.n_cells = r.integer("model.n_cells", m.n_cells);
  m.tol_mass = r.number("model.tol_mass", m.tol_mass);
  m.tol_root = r.number("model.tol_root", m.tol_root);
  m.tol_ode = r.number("model.tol_ode", m.tol_ode);
  c.degenerate_mode = r.boolean("model.degenerate_mode", false);
  const bool degenerate_mode = c.degenerate_mode;

  InitialSpec& ic = c.initial;
  if (auto k = r.raw("initial.kind")) ic.kind = *k;
  ic.a = r.number("initial.a", ic.a);
  ic.b = r.number("initial.b", ic.b);
  ic.mean = r.number("initial.mean", ic.mean);
  ic.width = r.number("initial.width", ic.width);
  ic.shear = r.number("initial.shear", ic.shear);
  if (auto p = r.raw("initial.path")) ic.path = *p;

  // Shear protocol: a constant rate or "t_start:b" pieces.
  const auto rate = r.raw("shear.rate");
  const auto pieces = r.raw("shear.pieces");
  if (rate && pieces) {
    diag.push_back("[shear]: give either rate or pieces, not both");
  } else if (rate) {
    double b = 0.0;
    if (!Reader::parse_double(*rate, b)) {
      diag.push_back("shear.rate: '" + *rate + "' is not a number");
    } else {
      c.protocol = ShearProtocol::constant(b);
    }
  } else if (pieces) {
    std::vector<ShearPiece> ps;
    bool ok = true;
    for (const std::string& item : split(*pieces, ',')) {
      const auto colon = item.find(':');
      ShearPiece p;
      if (colon == std::string::npos || !Reader::parse_double(trim(item.substr(0, colon)), p.t_start) ||
          !Reader::parse_double(trim(item.substr(colon + 1)), p.b)) {
        diag.push_back("shear.pieces: entry '" + item + "' is not of the form t_start:b");
        ok = false;
      } else {
        ps.push_back(p);
      }
    }
    if (ok) {
      try {
        c.protocol = ShearProtocol(ps);
      } catch (const ConfigError& e) {
        diag.push_back(std::string("shear.pieces: ") + e.what());
      }
    }
  }

  EvolveConfig& e = c.evolve;
  e.dt = r.number("evolve.dt", e.dt);
  e.horizon = r.number("evolve.horizon", e.horizon);
  e.picard_iters = r.integer("evolve.picard_iters", e.picard_iters);
  e.record_every = r.integer("evolve.record_every", e.record_every);
  e.snapshot_times = r.numbers("evolve.snapshot_times");
  e.terms.threshold_sink = r.boolean("evolve.threshold_sink", true);
  e.terms.reinjection = r.boolean("evolve.reinjection", true);
  e.terms.uniform_decay = r.number("evolve.decay", 0.0);
  e.epsilon = m.epsilon;
  e.tol_mass = m.tol_mass;

  c.steady_shear = r.number("steady.shear", 0.0);
  c.flow_shears = r.numbers("flowcurve.shears");
  c.sweep_eps = r.numbers("sweep.epsilons");
  c.sweep_t_from = r.number("sweep.t_from", 0.0);
  c.degeneracy_gamma = r.number("degeneracy.gamma", 0.0);
  c.degeneracy_horizon = r.number("degeneracy.horizon", 1.0);
  c.degeneracy_knots = r.integer("degeneracy.knots", 1000);

  // Required sections per scenario.
  std::vector<std::string> required = {"model"};
  switch (c.scenario) {
    case Scenario::Evolve:
      required.insert(required.end(), {"initial", "evolve"});
      break;
    case Scenario::Steady:
      break;
    case Scenario::FlowCurve:
      required.push_back("flowcurve");
      break;
    case Scenario::Degeneracy:
      required.push_back("initial");
      break;
    case Scenario::Sweep:
      required.insert(required.end(), {"initial", "evolve", "sweep"});
      break;
  }
  for (const std::string& s : required) {
    if (!r.has_section(s)) {
      diag.push_back(std::string("missing section [") + s + "] required by scenario " +
                     to_string(c.scenario));
    }
  }

  // Semantic checks.
  const bool uses_epsilon = c.scenario == Scenario::Evolve || c.scenario == Scenario::Sweep;
  try {
    m.validate(!uses_epsilon || degenerate_mode);
  } catch (const ConfigError& ex) {
    diag.push_back(ex.what());
  }
  const bool uses_initial = c.scenario == Scenario::Evolve || c.scenario == Scenario::Sweep ||
                            c.scenario == Scenario::Degeneracy;
  if (uses_initial) {
    if (ic.kind == "uniform") {
      if (!(ic.b > ic.a)) diag.push_back("initial: uniform needs a < b");
      if (std::abs(ic.a) > m.half_width || std::abs(ic.b) > m.half_width) {
        diag.push_back("initial: uniform support exceeds [-half_width, half_width]");
      }
    } else if (ic.kind == "gaussian") {
      if (!(ic.width > 0.0)) diag.push_back("initial: gaussian width must be positive");
    } else if (ic.kind == "steady") {
      if (ic.shear == 0.0 && !(m.alpha > 0.5)) {
        diag.push_back("initial: zero-shear steady profile needs alpha > 1/2");
      }
    } else if (ic.kind == "file") {
      if (ic.path.empty()) {
        diag.push_back("initial: kind = file needs a path");
      } else {
        std::filesystem::path p(ic.path);
        if (p.is_relative()) p = base_dir / p;
        if (!std::filesystem::exists(p)) {
          diag.push_back("initial: file '" + p.string() + "' does not exist");
        } else {
          ic.path = std::filesystem::absolute(p).lexically_normal().string();
        }
      }
    } else {
      diag.push_back("initial.kind: '" + ic.kind + "' is not one of uniform, gaussian, steady, file");
    }
  }
  if (uses_epsilon) {
    if (!(e.dt > 0.0) || !(e.horizon > 0.0)) diag.push_back("evolve: dt and horizon must be positive");
    if (e.picard_iters < 1) diag.push_back("evolve.picard_iters must be at least 1");
    if (e.record_every < 1) diag.push_back("evolve.record_every must be at least 1");
    if (!(e.terms.uniform_decay >= 0.0)) diag.push_back("evolve.decay must be nonnegative");
    for (double t : e.snapshot_times) {
      if (t < 0.0 || t > e.horizon) diag.push_back("evolve.snapshot_times: " + format_double(t) + " outside [0, horizon]");
    }
    if (e.dt > 0.0 && e.horizon > 0.0) {
      const double steps = std::round(e.horizon / e.dt);
      if (steps < 1 || std::abs(steps * e.dt - e.horizon) > 1e-9 * e.horizon) {
        diag.push_back("evolve: dt does not divide the horizon");
      }
    }
  }
  if (c.scenario == Scenario::FlowCurve) {
    if (c.flow_shears.empty()) diag.push_back("flowcurve.shears is empty");
    for (double b : c.flow_shears) {
      if (b == 0.0) {
        diag.push_back(
            "flowcurve.shears contains 0: sheared states need b != 0; run the steady scenario "
            "with steady.shear = 0 for the zero-shear state");
      }
    }
  }
  if (c.scenario == Scenario::Sweep) {
    if (c.sweep_eps.size() < 2) diag.push_back("sweep.epsilons needs at least two values");
    for (std::size_t i = 0; i < c.sweep_eps.size(); ++i) {
      if (!(c.sweep_eps[i] > 0.0)) diag.push_back("sweep.epsilons entries must be positive");
      if (i > 0 && !(c.sweep_eps[i] < c.sweep_eps[i - 1])) {
        diag.push_back("sweep.epsilons must be strictly decreasing");
      }
    }
  }
  if (c.scenario == Scenario::Degeneracy) {
    if (!(c.degeneracy_gamma >= 0.0)) diag.push_back("degeneracy.gamma must be nonnegative");
    if (!(c.degeneracy_horizon > 0.0)) diag.push_back("degeneracy.horizon must be positive");
    if (c.degeneracy_knots < 4) diag.push_back("degeneracy.knots must be at least 4");
  }

  if (!diag.empty()) {
    std::string msg;
    for (std::size_t i = 0; i < diag.size(); ++i) {
      if (i > 0) msg += "\n";
      msg += diag[i];
    }
    throw ConfigError(msg);
  }
  return c;
}

std::string RunConfig::canonical_ini() const {
  std::ostringstream os;
  const auto b = [](bool x) { return x ? "true" : "false"; };
  os << "[run]\nscenario = " << to_string(scenario) << "\n\n";
  os << "[model]\n"
     << "alpha = " << format_double(params.alpha) << "\n"
     << "epsilon = " << format_double(params.epsilon) << "\n"
     << "half_width = " << format_double(params.half_width) << "\n"
     << "n_cells = " << params.n_cells << "\n"
     << "tol_mass = " << format_double(params.tol_mass) << "\n"
     << "tol_root = " << format_double(params.tol_root) << "\n"
     << "tol_ode = " << format_double(params.tol_ode) << "\n"
     << "degenerate_mode = " << b(degenerate_mode) << "\n\n";
  os << "[initial]\n"
     << "kind = " << initial.kind << "\n"
     << "a = " << format_double(initial.a) << "\n"
     << "b = " << format_double(initial.b) << "\n"
     << "mean = " << format_double(initial.mean) << "\n"
     << "width = " << format_double(initial.width) << "\n"
     << "shear = " << format_double(initial.shear) << "\n";
  if (!initial.path.empty()) os << "path = " << initial.path << "\n";
  os << "\n[shear]\npieces = ";
  for (std::size_t i = 0; i < protocol.pieces().size(); ++i) {
    if (i > 0) os << ", ";
    os << format_double(protocol.pieces()[i].t_start) << ":" << format_double(protocol.pieces()[i].b);
  }
  os << "\n\n[evolve]\n"
     << "dt = " << format_double(evolve.dt) << "\n"
     << "horizon = " << format_double(evolve.horizon) << "\n"
     << "picard_iters = " << evolve.picard_iters << "\n"
     << "record_every = " << evolve.record_every << "\n";
  if (!evolve.snapshot_times.empty()) os << "snapshot_times = " << join_numbers(evolve.snapshot_times) << "\n";
  os << "threshold_sink = " << b(evolve.terms.threshold_sink) << "\n"
     << "reinjection = " << b(evolve.terms.reinjection) << "\n"
     << "decay = " << format_double(evolve.terms.uniform_decay) << "\n\n";
  os << "[steady]\nshear = " << format_double(steady_shear) << "\n\n";
  if (!flow_shears.empty()) os << "[flowcurve]\nshears = " << join_numbers(flow_shears) << "\n\n";
  if (!sweep_eps.empty()) {
    os << "[sweep]\nepsilons = " << join_numbers(sweep_eps) << "\n"
       << "t_from = " << format_double(sweep_t_from) << "\n\n";
  }
  os << "[degeneracy]\n"
     << "gamma = " << format_double(degeneracy_gamma) << "\n"
     << "horizon = " << format_double(degeneracy_horizon) << "\n"
     << "knots = " << degeneracy_knots << "\n";
  return os.str();
}

}  // namespace hl
