#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "phasefront/errors.hpp"
#include "phasefront/scenarios.hpp"

// Exit codes: 0 = PASS / complete, 1 = FAIL or runtime failure,
// 2 = configuration error (bad flags, bad JSON, unknown keys).
int main(int argc, char** argv) {
  CLI::App app{
      "phasefront: phase-space singularity detection and Schroedinger "
      "evolution experiments"};
  std::string scenario, config_path, out_dir;
  unsigned long seed = 0;
  double override_L = 0.0;
  int override_N = 0;

  app.add_option("scenario", scenario,
                 "one of: bargmann-map, wavefront, flow, evolve, "
                 "propagation-check, anomaly-demo, paradiff-probe")
      ->required();
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--out", out_dir, "output directory (created when missing)")
      ->required();
  app.add_option("--seed", seed, "seed for randomized probes (default 0)");
  app.add_option("--L", override_L, "override grid.half_width");
  app.add_option("--N", override_N, "override grid.samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::ifstream in(config_path);
    if (!in) {
      std::fprintf(stderr, "phasefront: cannot read config %s\n",
                   config_path.c_str());
      return 2;
    }
    std::ostringstream ss;
    ss << in.rdbuf();

    const phasefront::ScenarioOutcome r = phasefront::run_scenario(
        scenario, ss.str(), out_dir, seed, override_L, override_N);
    std::printf("phasefront %s: %s (%s)\n", scenario.c_str(),
                r.status.c_str(), r.report_path.c_str());
    return r.exit_code;
  } catch (const phasefront::ConfigError& e) {
    std::fprintf(stderr, "phasefront: config error: %s\n", e.what());
    return 2;
  } catch (const phasefront::FileFormatError& e) {
    std::fprintf(stderr, "phasefront: file error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "phasefront: %s failed: %s\n", scenario.c_str(),
                 e.what());
    return 1;
  }
}
