#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "hl/config.hpp"
#include "hl/errors.hpp"
#include "hl/run.hpp"

using namespace hl;

namespace {

const char* kEvolve = R"(# minimal evolve run
[run]
scenario = evolve

[model]
alpha = 1

[initial]
kind = uniform
a = -1
b = 1

[shear]
rate = 0

[evolve]
horizon = 1
)";

std::string error_of(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    (void)parse_config(text, overrides);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& part) {
  return s.find(part) != std::string::npos;
}

}  // namespace

TEST_CASE("minimal evolve config") {
  const RunConfig c = parse_config(kEvolve);
  CHECK(c.scenario == Scenario::Evolve);
  CHECK(c.params.alpha == 1.0);
  CHECK(c.initial.kind == "uniform");
  CHECK(c.protocol.identically_zero());
  CHECK(c.evolve.horizon == 1.0);
  CHECK(c.evolve.epsilon == c.params.epsilon);
  CHECK(c.evolve.tol_mass == c.params.tol_mass);
}

TEST_CASE("misaligned n_cells names the nearest valid size") {
  const std::string e = error_of(kEvolve, {"model.n_cells=1605"});
  CHECK(contains(e, "1600"));
}

TEST_CASE("flow curve with b = 0 is rejected") {
  const std::string e = error_of("[run]\nscenario = flowcurve\n[model]\nalpha = 1\n"
                                 "[flowcurve]\nshears = -1, 0, 1\n");
  CHECK(contains(e, "contains 0"));
}

TEST_CASE("unknown keys, sections and bad numbers are all reported") {
  const std::string text = std::string(kEvolve) + "\n[extra]\nx = 1\n";
  const std::string e = error_of(text, {"model.alpah=2", "evolve.dt=abc"});
  CHECK(contains(e, "extra"));
  CHECK(contains(e, "alpah"));
  CHECK(contains(e, "abc"));
  CHECK(contains(e, "\n"));
}

TEST_CASE("missing sections") {
  const std::string e = error_of("[run]\nscenario = sweep\n[model]\nalpha = 1\n");
  CHECK(contains(e, "[initial]"));
  CHECK(contains(e, "[evolve]"));
  CHECK(contains(e, "[sweep]"));
}

TEST_CASE("zero viscosity needs degenerate mode") {
  CHECK_FALSE(error_of(kEvolve, {"model.epsilon=0"}).empty());
  CHECK(error_of(kEvolve, {"model.epsilon=0", "model.degenerate_mode=true"}).empty());
}

TEST_CASE("scenario override must agree with the file") {
  CHECK(contains(error_of(kEvolve, {"run.scenario=steady"}), "scenario"));
  CHECK(error_of(kEvolve, {"run.scenario=evolve"}).empty());
  CHECK(contains(error_of(kEvolve, {"run.scenario=bogus"}), "bogus"));
}

TEST_CASE("shear pieces and evolve checks") {
  const RunConfig c = parse_config(kEvolve, {"shear.rate=", "shear.pieces=0:1, 0.5:-1"});
  CHECK(c.protocol.pieces().size() == 2);
  CHECK(contains(error_of(kEvolve, {"shear.pieces=0:1"}), "either"));
  CHECK(contains(error_of(kEvolve, {"evolve.dt=0.3"}), "divide"));
}

TEST_CASE("canonical ini parses back to the same settings") {
  RunConfig c = parse_config(kEvolve, {"model.epsilon=0.0123", "evolve.snapshot_times=0.1, 0.5",
                                       "shear.rate=", "shear.pieces=0:1, 0.25:-0.5"});
  const std::string ini = c.canonical_ini();
  const RunConfig d = parse_config(ini);
  CHECK(d.canonical_ini() == ini);
  CHECK(d.params.epsilon == 0.0123);
  CHECK(d.protocol.pieces().size() == 2);
}

TEST_CASE("file initial condition") {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "hl_test_config";
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(dir / "ic.csv");
    os << "sigma,p\n-0.5,1\n0.5,1\n";
  }
  const std::string text = std::string(kEvolve) + "";
  const RunConfig c = parse_config(text, {"initial.kind=file", "initial.path=ic.csv"}, dir);
  CHECK(std::filesystem::path(c.initial.path).is_absolute());
  const StressGrid g = StressGrid::build(8.0, 1600);
  double factor = 0.0;
  const DensityField p = build_initial(c, g, factor);
  CHECK(p.mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(factor == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(contains(error_of(text, {"initial.kind=file", "initial.path=missing.csv"}), "does not exist"));
  {
    std::ofstream os(dir / "bad.csv");
    os << "sigma,p\n0.5,1\n-0.5,1\n";
  }
  const RunConfig bad = parse_config(text, {"initial.kind=file", "initial.path=bad.csv"}, dir);
  CHECK_THROWS_AS(build_initial(bad, g, factor), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("format_double round-trips") {
  const double x = 0.1 + 0.2;
  CHECK(std::stod(format_double(x)) == x);
  CHECK(format_double(1.0) == "1");
}
