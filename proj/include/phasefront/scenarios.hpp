#pragma once

#include <string>

// Named batch experiments composing the library modules: each scenario takes
// a JSON config document, writes its artifacts (report.json, CSV files) plus
// a manifest.json echoing the fully resolved config and referencing every
// artifact, and returns PASS/FAIL/complete. Reruns with the same config and
// seed produce byte-identical files.
namespace phasefront {

struct ScenarioOutcome {
  int exit_code = 0;         // 0 = pass/complete, 1 = fail
  std::string status;        // "pass", "fail", or "complete"
  std::string report_path;   // primary JSON artifact (inside out_dir)
};

// Scenarios: bargmann-map, wavefront, flow, evolve, propagation-check,
// anomaly-demo, paradiff-probe. config_text is the JSON document; unknown
// keys anywhere in it are ConfigErrors. out_dir is created when missing.
// seed feeds the randomized probes (and is echoed in the manifest). Positive
// overrides replace the config's grid entries before anything runs.
ScenarioOutcome run_scenario(const std::string& scenario,
                             const std::string& config_text,
                             const std::string& out_dir, unsigned long seed,
                             double half_width_override = 0.0,
                             int sample_override = 0);

}  // namespace phasefront
