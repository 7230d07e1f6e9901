#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "phasefront/errors.hpp"
#include "phasefront/field.hpp"
#include "phasefront/scenarios.hpp"
#include "phasefront/serialize.hpp"

using namespace phasefront;
namespace fs = std::filesystem;
using njson = nlohmann::json;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

njson load_json(const fs::path& p) { return njson::parse(slurp(p)); }

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("pf_cli_" + name);
  fs::remove_all(p);
  return p;
}

// Directory contents must be exactly manifest.json plus the artifacts the
// manifest lists: nothing missing, nothing orphaned.
void check_manifest_closure(const fs::path& dir) {
  const njson m = load_json(dir / "manifest.json");
  std::set<std::string> listed;
  for (const auto& a : m["artifacts"]) listed.insert(a.get<std::string>());
  for (const std::string& a : listed) CHECK(fs::exists(dir / a));
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    CHECK((name == "manifest.json" || listed.count(name) == 1));
  }
}

}  // namespace

TEST_CASE("flow scenario reports the exact rotation") {
  const fs::path out = fresh_dir("flow");
  const std::string cfg = R"({
    "hamiltonian": {"type": "harmonic_oscillator"},
    "t": 1.5707963267948966,
    "z0": [1.0, 0.0],
    "numeric": {"dt": 0.001}
  })";
  const ScenarioOutcome r = run_scenario("flow", cfg, out.string(), 0);
  CHECK(r.exit_code == 0);
  CHECK(r.status == "complete");

  const njson rep = load_json(out / "report.json");
  // z(t) = (cos t, -sin t) for the oscillator: a quarter turn lands on
  // (0, -1) and the direction map sends 0 to 3 pi / 2.
  CHECK(std::abs(rep["endpoint"][0].get<double>()) < 1e-12);
  CHECK(rep["endpoint"][1].get<double>() == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(rep["symplectic_defect"].get<double>() < 1e-12);
  CHECK(rep["direction"]["theta_t"].get<double>() ==
        doctest::Approx(3.0 * kPi / 2.0).epsilon(1e-12));
  CHECK(rep["numeric"]["error"].get<double>() < 1e-8);
  check_manifest_closure(out);

  const njson m = load_json(out / "manifest.json");
  CHECK(m["scenario"] == "flow");
  CHECK(m["status"] == "complete");
  CHECK(m["exit_code"] == 0);
  CHECK(m["config"]["hamiltonian"]["type"] == "harmonic_oscillator");
}

TEST_CASE("wavefront scenario flags the constant's frequency axis") {
  const fs::path out = fresh_dir("wf");
  const std::string cfg = R"({
    "grid": {"half_width": 48.0, "samples": 4096},
    "datum": {"type": "constant"}
  })";
  const ScenarioOutcome r = run_scenario("wavefront", cfg, out.string(), 0);
  CHECK(r.exit_code == 0);

  const njson rep = load_json(out / "report.json");
  REQUIRE(rep["bins"].size() == 64);
  const auto dirs = rep["singular_directions"];
  REQUIRE_FALSE(dirs.empty());
  double d0 = 1e300, dpi = 1e300;
  for (const auto& d : dirs) {
    const double v = d.get<double>();
    d0 = std::min(d0, std::min(v, 2.0 * kPi - v));
    dpi = std::min(dpi, std::abs(v - kPi));
  }
  const double bin = 2.0 * kPi / 64;
  CHECK(d0 <= bin);   // the x-ray direction theta = 0
  CHECK(dpi <= bin);  // and its antipode
  check_manifest_closure(out);
}

TEST_CASE("evolve scenario writes snapshots that match the eigenphase") {
  const fs::path out = fresh_dir("evolve");
  const std::string cfg = R"({
    "grid": {"half_width": 24.0, "samples": 512},
    "datum": {"type": "hermite", "index": 0},
    "hamiltonian": {"type": "harmonic_oscillator"},
    "nonlinearity": {"type": "zero"},
    "t_final": 3.141592653589793,
    "dt": 0.0314159265358979,
    "snapshots": [1.5707963267948966, 3.141592653589793]
  })";
  const ScenarioOutcome r = run_scenario("evolve", cfg, out.string(), 0);
  CHECK(r.exit_code == 0);
  CHECK(r.status == "complete");

  const njson rep = load_json(out / "report.json");
  CHECK(rep["l2_drift"].get<double>() < 1e-12);
  CHECK(rep["initial_energy"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rep["final_energy"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rep["steps"] == 100);
  CHECK(rep["warnings"].empty());

  // One diagnostics row per step boundary, plus the header.
  const std::string diag = slurp(out / "diagnostics.csv");
  CHECK(std::count(diag.begin(), diag.end(), '\n') == 102);

  // Ground state at t = pi carries e^{-i pi/2} = -i.
  const GridSpec1D g = make_grid(24.0, 512);
  const SampledField snap =
      read_signal_csv((out / "snapshot_001.csv").string(), g);
  const SampledField h0 = synthesize(SignalSpec::hermite(0), g);
  double err = 0.0;
  for (int j = 0; j < g.sample_count; ++j)
    err = std::max(err, std::abs(snap.values[j] -
                                 cplx(0.0, -1.0) * h0.values[j]));
  CHECK(err < 1e-9);
  check_manifest_closure(out);
}

TEST_CASE("evolve scenario accepts polynomial potentials") {
  const fs::path out = fresh_dir("evpot");
  // V(x) = x^2/2 written as a polynomial: same spectrum as the oscillator
  // Hamiltonian, so the ground-state energy diagnostic still reads 1/2.
  const std::string cfg = R"({
    "grid": {"half_width": 24.0, "samples": 512},
    "datum": {"type": "hermite", "index": 0},
    "hamiltonian": {"type": "potential", "coefficients": [0.0, 0.0, 0.5]},
    "t_final": 0.5, "dt": 0.001
  })";
  const ScenarioOutcome r = run_scenario("evolve", cfg, out.string(), 0);
  CHECK(r.exit_code == 0);
  const njson rep = load_json(out / "report.json");
  CHECK(rep["initial_energy"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(rep["l2_drift"].get<double>() < 1e-9);
}

TEST_CASE("propagation-check scenario follows the rotated directions") {
  const fs::path out = fresh_dir("prop");
  const std::string cfg = R"({
    "grid": {"half_width": 48.0, "samples": 8192},
    "datum": {"type": "constant", "window": {"plateau": 36.0, "cutoff": 44.0}},
    "hamiltonian": {"type": "harmonic_oscillator"},
    "times": [0.39269908169872414, 0.7853981633974483, 1.1780972450961724],
    "tolerance_bins": 1.0
  })";
  const ScenarioOutcome r =
      run_scenario("propagation-check", cfg, out.string(), 0);
  CHECK(r.exit_code == 0);
  CHECK(r.status == "pass");

  const njson rep = load_json(out / "report.json");
  CHECK(rep["pass"] == true);
  REQUIRE(rep["times"].size() == 3);
  for (const auto& t : rep["times"]) {
    CHECK(t["ok"] == true);
    CHECK(t["extraneous"].empty());
    CHECK_FALSE(t["detected"].empty());
    for (const auto& m : t["matches"]) CHECK(m["ok"] == true);
  }
  const njson man = load_json(out / "manifest.json");
  CHECK(man["status"] == "pass");
  CHECK(man["exit_code"] == 0);
  check_manifest_closure(out);
}

TEST_CASE("propagation-check fails honestly under an impossible tolerance") {
  const fs::path out = fresh_dir("propfail");
  // t = half an angular bin: the rotated directions land between bin
  // centers, so a 0.001-bin tolerance cannot be met.
  const std::string cfg = R"({
    "grid": {"half_width": 48.0, "samples": 4096},
    "datum": {"type": "constant", "window": {"plateau": 36.0, "cutoff": 44.0}},
    "hamiltonian": {"type": "harmonic_oscillator"},
    "times": [0.049087385212340517],
    "tolerance_bins": 0.001
  })";
  const ScenarioOutcome r =
      run_scenario("propagation-check", cfg, out.string(), 0);
  CHECK(r.exit_code == 1);
  CHECK(r.status == "fail");
  const njson rep = load_json(out / "report.json");
  CHECK(rep["pass"] == false);
  const njson man = load_json(out / "manifest.json");
  CHECK(man["status"] == "fail");
  CHECK(man["exit_code"] == 1);
}

TEST_CASE("anomaly-demo flags the doubled chirp slope") {
  const fs::path out = fresh_dir("anom");
  const std::string cfg = R"({
    "grid": {"half_width": 48.0, "samples": 4096},
    "datum": {"type": "chirp", "slope": 1.0,
              "window": {"plateau": 12.0, "cutoff": 20.0}},
    "operation": {"type": "square"},
    "sigma": 1.0
  })";
  const ScenarioOutcome r = run_scenario("anomaly-demo", cfg, out.string(), 0);
  CHECK(r.exit_code == 0);
  CHECK(r.status == "pass");

  const njson rep = load_json(out / "report.json");
  CHECK(rep["theta"].get<double>() ==
        doctest::Approx(std::atan(2.0)).epsilon(1e-12));
  CHECK(rep["pass"] == true);
  CHECK_FALSE(rep["anomalous_directions"].empty());
  CHECK(rep["nearest_anomaly_distance"].get<double>() <= 2.0 * kPi / 64);
  CHECK(rep["output_regular"] == false);
  check_manifest_closure(out);
}

TEST_CASE("paradiff-probe is deterministic in the seed") {
  const std::string cfg = R"({
    "grid": {"half_width": 40.0, "samples": 1024},
    "datum": {"type": "gaussian", "width": 2.0},
    "nonlinearity": {"type": "gauge"},
    "levels": 4, "delta": 0.5,
    "moser": {"trials": 2}
  })";
  const fs::path o1 = fresh_dir("pp1");
  const fs::path o2 = fresh_dir("pp2");
  const fs::path o3 = fresh_dir("pp3");
  CHECK(run_scenario("paradiff-probe", cfg, o1.string(), 7).exit_code == 0);
  CHECK(run_scenario("paradiff-probe", cfg, o2.string(), 7).exit_code == 0);
  CHECK(run_scenario("paradiff-probe", cfg, o3.string(), 8).exit_code == 0);

  // Same seed: byte-identical artifacts. Different seed: the randomized
  // ratios move, everything else stays.
  CHECK(slurp(o1 / "report.json") == slurp(o2 / "report.json"));
  CHECK(slurp(o1 / "summary.json") == slurp(o2 / "summary.json"));
  CHECK(slurp(o1 / "manifest.json") == slurp(o2 / "manifest.json"));
  CHECK(slurp(o1 / "summary.json") == slurp(o3 / "summary.json"));
  const njson r1 = load_json(o1 / "report.json");
  const njson r3 = load_json(o3 / "report.json");
  CHECK(r1["moser_ratios"] != r3["moser_ratios"]);
  REQUIRE(r1["moser_ratios"].size() == 2);
  for (const auto& c : r1["moser_ratios"]) {
    CHECK(c.get<double>() > 0.0);
    CHECK(c.get<double>() < 2.0);
  }

  const njson sum = load_json(o1 / "summary.json");
  CHECK(sum["level_count"] == 4);
  CHECK(sum["levels"].size() == 4);
  check_manifest_closure(o1);
}

TEST_CASE("config validation rejects unknown keys, bad types, bad scenarios") {
  const fs::path out = fresh_dir("cfgerr");
  const std::string good = R"({
    "grid": {"half_width": 20.0, "samples": 256},
    "datum": {"type": "gaussian"}
  })";
  CHECK_THROWS_AS(run_scenario("nosuch", good, out.string(), 0), ConfigError);
  CHECK_THROWS_AS(run_scenario("wavefront", "not json", out.string(), 0),
                  ConfigError);
  CHECK_THROWS_AS(run_scenario("wavefront", "[1,2]", out.string(), 0),
                  ConfigError);

  const std::string unknown_top = R"({
    "grid": {"half_width": 20.0, "samples": 256},
    "datum": {"type": "gaussian"}, "typo": 1
  })";
  CHECK_THROWS_AS(run_scenario("wavefront", unknown_top, out.string(), 0),
                  ConfigError);

  const std::string unknown_nested = R"({
    "grid": {"half_width": 20.0, "samples": 256},
    "datum": {"type": "gaussian", "sloppe": 1.0}
  })";
  CHECK_THROWS_AS(run_scenario("wavefront", unknown_nested, out.string(), 0),
                  ConfigError);

  const std::string bad_type = R"({
    "grid": {"half_width": 20.0, "samples": "many"},
    "datum": {"type": "gaussian"}
  })";
  CHECK_THROWS_AS(run_scenario("wavefront", bad_type, out.string(), 0),
                  ConfigError);

  const std::string no_grid = R"({"datum": {"type": "gaussian"}})";
  CHECK_THROWS_AS(run_scenario("wavefront", no_grid, out.string(), 0),
                  ConfigError);

  // theta has no default unless the datum is a chirp under the square rule.
  const std::string anom_no_theta = R"({
    "grid": {"half_width": 20.0, "samples": 256},
    "datum": {"type": "gaussian"},
    "operation": {"type": "gauge"}
  })";
  CHECK_THROWS_AS(run_scenario("anomaly-demo", anom_no_theta, out.string(), 0),
                  ConfigError);

  // flow needs a direction map, which a general potential does not have.
  const std::string prop_potential = R"({
    "grid": {"half_width": 20.0, "samples": 256},
    "datum": {"type": "gaussian"},
    "hamiltonian": {"type": "potential", "coefficients": [0.0, 1.0]},
    "times": [0.1]
  })";
  CHECK_THROWS_AS(
      run_scenario("propagation-check", prop_potential, out.string(), 0),
      ConfigError);
}

TEST_CASE("grid overrides replace the config grid before running") {
  const fs::path out = fresh_dir("override");
  const std::string cfg = R"({
    "grid": {"half_width": 20.0, "samples": 256},
    "datum": {"type": "gaussian", "width": 2.0},
    "nonlinearity": {"type": "square"},
    "levels": 3, "delta": 0.5
  })";
  const ScenarioOutcome r =
      run_scenario("paradiff-probe", cfg, out.string(), 0, 40.0, 512);
  CHECK(r.exit_code == 0);
  const njson man = load_json(out / "manifest.json");
  CHECK(man["config"]["grid"]["half_width"] == 40.0);
  CHECK(man["config"]["grid"]["samples"] == 512);
  const njson sum = load_json(out / "summary.json");
  CHECK(sum["grid"]["sample_count"] == 512);
}

TEST_CASE("the binary maps outcomes onto its exit codes") {
  const fs::path dir = fresh_dir("bin");
  fs::create_directories(dir);
  const fs::path cfg = dir / "flow.json";
  {
    std::ofstream out(cfg);
    out << R"({"hamiltonian": {"type": "harmonic_oscillator"},
               "t": 0.0, "z0": [1.0, 0.0]})";
  }
  auto run = [&](const std::string& args) {
    const std::string cmd = std::string(PF_CLI_PATH) + " " + args +
                            " > /dev/null 2> /dev/null";
    const int st = std::system(cmd.c_str());
    REQUIRE(st != -1);
    return WEXITSTATUS(st);
  };

  CHECK(run("flow --config " + cfg.string() + " --out " +
            (dir / "ok").string()) == 0);
  // At t = 0 the flow is the identity, so the endpoint echoes z0 = (1,0).
  const njson rep = load_json(dir / "ok" / "report.json");
  CHECK(rep["endpoint"][0] == 1.0);
  CHECK(rep["endpoint"][1] == 0.0);

  CHECK(run("nosuch --config " + cfg.string() + " --out " +
            (dir / "bad1").string()) == 2);
  CHECK(run("flow --config " + (dir / "missing.json").string() + " --out " +
            (dir / "bad2").string()) == 2);
  CHECK(run("flow --out " + (dir / "bad3").string()) == 2);  // --config required
}
