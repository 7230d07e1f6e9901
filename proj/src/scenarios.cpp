#include "phasefront/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "phasefront/bargmann.hpp"
#include "phasefront/errors.hpp"
#include "phasefront/field.hpp"
#include "phasefront/hamflow.hpp"
#include "phasefront/nonlinearity.hpp"
#include "phasefront/paradiff.hpp"
#include "phasefront/qsobolev.hpp"
#include "phasefront/schrodinger.hpp"
#include "phasefront/serialize.hpp"
#include "phasefront/wavefront.hpp"

namespace phasefront {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr double kPi = 3.141592653589793238462643383279502884;

// ---- strict config access -------------------------------------------------
// Every object is checked against its full key list, so a typo or a stale
// key fails loudly instead of being ignored.

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
  if (!j.is_object())
    throw ConfigError(ctx + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) { ok = true; break; }
    if (!ok) throw ConfigError("unknown key '" + item.key() + "' in " + ctx);
  }
}

const json& member(const json& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end())
    throw ConfigError(ctx + " is missing required key '" + key + "'");
  return *it;
}

double num_at(const json& j, const char* key, const std::string& ctx) {
  const json& v = member(j, key, ctx);
  if (!v.is_number())
    throw ConfigError(ctx + "." + key + " must be a number");
  return v.get<double>();
}

double num_or(const json& j, const char* key, double dflt,
              const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) return dflt;
  if (!it->is_number())
    throw ConfigError(ctx + "." + key + " must be a number");
  return it->get<double>();
}

int int_at(const json& j, const char* key, const std::string& ctx) {
  const json& v = member(j, key, ctx);
  if (!v.is_number_integer())
    throw ConfigError(ctx + "." + key + " must be an integer");
  return v.get<int>();
}

int int_or(const json& j, const char* key, int dflt, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) return dflt;
  if (!it->is_number_integer())
    throw ConfigError(ctx + "." + key + " must be an integer");
  return it->get<int>();
}

bool bool_or(const json& j, const char* key, bool dflt,
             const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) return dflt;
  if (!it->is_boolean())
    throw ConfigError(ctx + "." + key + " must be a boolean");
  return it->get<bool>();
}

std::string str_at(const json& j, const char* key, const std::string& ctx) {
  const json& v = member(j, key, ctx);
  if (!v.is_string())
    throw ConfigError(ctx + "." + key + " must be a string");
  return v.get<std::string>();
}

std::string str_or(const json& j, const char* key, const std::string& dflt,
                   const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) return dflt;
  if (!it->is_string())
    throw ConfigError(ctx + "." + key + " must be a string");
  return it->get<std::string>();
}

std::vector<double> num_array(const json& v, const std::string& ctx) {
  if (!v.is_array()) throw ConfigError(ctx + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number())
      throw ConfigError(ctx + " must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

json empty_object() { return json::object(); }

json obj_or_empty(const json& j, const char* key, json fallback,
                  const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_object())
    throw ConfigError(ctx + "." + key + " must be an object");
  return *it;
}

// ---- shared parsers (each echoes the resolved values) ----------------------

GridSpec1D parse_grid(const json& cfg, double override_L, int override_N,
                      json& resolved) {
  const json& g = member(cfg, "grid", "config");
  check_keys(g, {"half_width", "samples"}, "grid");
  double L = num_at(g, "half_width", "grid");
  int N = int_at(g, "samples", "grid");
  if (override_L > 0.0) L = override_L;
  if (override_N > 0) N = override_N;
  GridSpec1D grid = make_grid(L, N);
  resolved["grid"] = {{"half_width", grid.half_width},
                      {"samples", grid.sample_count}};
  return grid;
}

SampledField parse_datum(const json& cfg, const GridSpec1D& grid,
                         json& resolved) {
  const json& d = member(cfg, "datum", "config");
  check_keys(d, {"type", "width", "slope", "index", "path", "window"},
             "datum");
  const std::string type = str_at(d, "type", "datum");
  SignalSpec spec;
  json echo;
  echo["type"] = type;
  if (type == "constant") {
    spec = SignalSpec::constant();
  } else if (type == "gaussian") {
    spec = SignalSpec::gaussian(num_or(d, "width", 1.0, "datum"));
    echo["width"] = spec.width;
  } else if (type == "chirp") {
    spec = SignalSpec::chirp(num_at(d, "slope", "datum"));
    echo["slope"] = spec.slope;
  } else if (type == "hermite") {
    spec = SignalSpec::hermite(int_at(d, "index", "datum"));
    echo["index"] = spec.index;
  } else if (type == "delta") {
    spec = SignalSpec::delta(num_or(d, "width", 0.05, "datum"));
    echo["width"] = spec.width;
  } else if (type == "file") {
    spec = SignalSpec::file(str_at(d, "path", "datum"));
    echo["path"] = spec.path;
  } else {
    throw ConfigError("datum.type '" + type + "' is not a known signal");
  }
  SampledField u = synthesize(spec, grid);
  if (auto it = d.find("window"); it != d.end()) {
    check_keys(*it, {"plateau", "cutoff"}, "datum.window");
    const double plateau = num_at(*it, "plateau", "datum.window");
    const double cutoff = num_at(*it, "cutoff", "datum.window");
    u = apply_window(u, plateau, cutoff);
    echo["window"] = {{"plateau", plateau}, {"cutoff", cutoff}};
  }
  resolved["datum"] = echo;
  return u;
}

DetectionParams parse_detector(const json& cfg, json& resolved) {
  const json& d = obj_or_empty(cfg, "detector", empty_object(), "config");
  check_keys(d,
             {"angular_bins", "sector_half_width", "inner_radius",
              "outer_radius", "shell_count", "n_max", "n_threshold",
              "probe_spacing", "probe_margin", "floor_rel", "sobolev_orders",
              "growth_inner", "growth_radii", "growth_threshold"},
             "detector");
  DetectionParams p;
  p.angular_bins = int_or(d, "angular_bins", p.angular_bins, "detector");
  p.sector_half_width =
      num_or(d, "sector_half_width", p.sector_half_width, "detector");
  p.inner_radius = num_or(d, "inner_radius", p.inner_radius, "detector");
  p.outer_radius = num_or(d, "outer_radius", p.outer_radius, "detector");
  p.shell_count = int_or(d, "shell_count", p.shell_count, "detector");
  p.n_max = num_or(d, "n_max", p.n_max, "detector");
  p.n_threshold = num_or(d, "n_threshold", p.n_threshold, "detector");
  p.probe_spacing = num_or(d, "probe_spacing", p.probe_spacing, "detector");
  p.probe_margin = num_or(d, "probe_margin", p.probe_margin, "detector");
  p.floor_rel = num_or(d, "floor_rel", p.floor_rel, "detector");
  if (auto it = d.find("sobolev_orders"); it != d.end())
    p.sobolev_orders = num_array(*it, "detector.sobolev_orders");
  p.growth_inner = num_or(d, "growth_inner", p.growth_inner, "detector");
  if (auto it = d.find("growth_radii"); it != d.end())
    p.growth_radii = num_array(*it, "detector.growth_radii");
  p.growth_threshold =
      num_or(d, "growth_threshold", p.growth_threshold, "detector");

  resolved["detector"] = {{"angular_bins", p.angular_bins},
                          {"sector_half_width", p.sector_half_width},
                          {"inner_radius", p.inner_radius},
                          {"outer_radius", p.outer_radius},
                          {"shell_count", p.shell_count},
                          {"n_max", p.n_max},
                          {"n_threshold", p.n_threshold},
                          {"probe_spacing", p.probe_spacing},
                          {"probe_margin", p.probe_margin},
                          {"floor_rel", p.floor_rel},
                          {"sobolev_orders", p.sobolev_orders},
                          {"growth_inner", p.growth_inner},
                          {"growth_radii", p.growth_radii},
                          {"growth_threshold", p.growth_threshold}};
  return p;
}

Nonlinearity parse_nonlinearity(const json& cfg, const char* key,
                                json& resolved) {
  const json& n = obj_or_empty(cfg, key, json{{"type", "zero"}},
                               "config");
  check_keys(n, {"type", "coefficients"}, key);
  const std::string type = str_at(n, "type", key);
  json echo;
  echo["type"] = type;
  Nonlinearity F;
  if (type == "zero") {
    F = nl_zero();
  } else if (type == "identity") {
    F = nl_identity();
  } else if (type == "square") {
    F = nl_square();
  } else if (type == "gauge") {
    F = nl_gauge();
  } else if (type == "power_series") {
    const json& arr = member(n, "coefficients", key);
    if (!arr.is_array() || arr.empty())
      throw ConfigError(std::string(key) +
                        ".coefficients must be a nonempty array");
    std::vector<cplx> coeffs;
    json echo_coeffs = json::array();
    for (const auto& e : arr) {
      cplx c;
      if (e.is_number()) {
        c = cplx(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() &&
                 e[1].is_number()) {
        c = cplx(e[0].get<double>(), e[1].get<double>());
      } else {
        throw ConfigError(std::string(key) +
                          ".coefficients entries must be numbers or "
                          "[re, im] pairs");
      }
      coeffs.push_back(c);
      echo_coeffs.push_back({c.real(), c.imag()});
    }
    F = nl_power_series(coeffs);
    echo["coefficients"] = echo_coeffs;
  } else {
    throw ConfigError(std::string(key) + ".type '" + type +
                      "' is not a known rule");
  }
  resolved[key] = echo;
  return F;
}

struct HamiltonianSpec {
  std::string type;                  // harmonic_oscillator | quadratic | potential
  double x2 = 1.0, xi2 = 1.0, cross = 0.0;
  std::vector<double> poly;          // potential: V(x) = sum_k poly[k] x^k
};

HamiltonianSpec parse_hamiltonian(const json& cfg, json& resolved) {
  const json& h = obj_or_empty(cfg, "hamiltonian",
                               json{{"type", "harmonic_oscillator"}},
                               "config");
  check_keys(h, {"type", "x2", "xi2", "cross", "coefficients"}, "hamiltonian");
  HamiltonianSpec spec;
  spec.type = str_at(h, "type", "hamiltonian");
  json echo;
  echo["type"] = spec.type;
  if (spec.type == "harmonic_oscillator") {
    // nothing more
  } else if (spec.type == "quadratic") {
    spec.x2 = num_or(h, "x2", 1.0, "hamiltonian");
    spec.xi2 = num_or(h, "xi2", 1.0, "hamiltonian");
    spec.cross = num_or(h, "cross", 0.0, "hamiltonian");
    echo["x2"] = spec.x2;
    echo["xi2"] = spec.xi2;
    echo["cross"] = spec.cross;
  } else if (spec.type == "potential") {
    spec.poly = num_array(member(h, "coefficients", "hamiltonian"),
                          "hamiltonian.coefficients");
    echo["coefficients"] = spec.poly;
  } else {
    throw ConfigError("hamiltonian.type '" + spec.type + "' is not known");
  }
  resolved["hamiltonian"] = echo;
  return spec;
}

QuadraticHamiltonian to_quadratic(const HamiltonianSpec& spec) {
  if (spec.type == "harmonic_oscillator") return harmonic_oscillator(1);
  Eigen::MatrixXd A(2, 2);
  A << spec.x2, spec.cross, spec.cross, spec.xi2;
  return make_quadratic(A);
}

void fill_hamiltonian(const HamiltonianSpec& spec, const GridSpec1D& grid,
                      EvolutionConfig& ec) {
  if (spec.type == "harmonic_oscillator") {
    ec.hamiltonian = EvolutionConfig::Hamiltonian::harmonic_oscillator;
  } else if (spec.type == "quadratic") {
    ec.hamiltonian = EvolutionConfig::Hamiltonian::quadratic;
    ec.quad_x2 = spec.x2;
    ec.quad_xi2 = spec.xi2;
    ec.quad_cross = spec.cross;
  } else {
    ec.hamiltonian = EvolutionConfig::Hamiltonian::potential;
    ec.potential_values.resize(grid.sample_count);
    for (int j = 0; j < grid.sample_count; ++j) {
      const double x = grid.x(j);
      double v = 0.0;
      for (size_t k = spec.poly.size(); k-- > 0;)
        v = v * x + spec.poly[k];
      ec.potential_values[j] = v;
    }
  }
}

// ---- artifact plumbing ------------------------------------------------------

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out)
    throw FileFormatError("cannot open " + p.string() + " for writing");
  out << text;
  if (!out) throw FileFormatError("write failed for " + p.string());
}

void write_json_file(const fs::path& p, const json& j) {
  write_text(p, j.dump(2) + "\n");
}

void write_manifest(const fs::path& out_dir, const std::string& scenario,
                    unsigned long seed, const json& resolved,
                    const std::vector<std::string>& artifacts,
                    const std::string& status, int exit_code) {
  json m;
  m["scenario"] = scenario;
  m["seed"] = seed;
  m["status"] = status;
  m["exit_code"] = exit_code;
  m["config"] = resolved;
  m["artifacts"] = artifacts;
  write_json_file(out_dir / "manifest.json", m);
}

std::string csv_row(std::initializer_list<double> vals) {
  std::string row;
  char buf[64];
  bool first = true;
  for (double v : vals) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    if (!first) row += ',';
    row += buf;
    first = false;
  }
  row += '\n';
  return row;
}

json directions_json(const std::vector<double>& dirs) {
  json a = json::array();
  for (double d : dirs) a.push_back(d);
  return a;
}

// ---- scenarios --------------------------------------------------------------

ScenarioOutcome scenario_bargmann_map(const json& cfg, const fs::path& out,
                                      unsigned long seed, double oL, int oN) {
  check_keys(cfg, {"grid", "datum", "map", "compare_closed_form", "annulus"},
             "config");
  json resolved;
  const GridSpec1D grid = parse_grid(cfg, oL, oN, resolved);
  const SampledField u = parse_datum(cfg, grid, resolved);

  const json& m = member(cfg, "map", "config");
  check_keys(m, {"extent", "count"}, "map");
  const double extent = num_at(m, "extent", "map");
  const int count = int_at(m, "count", "map");
  resolved["map"] = {{"extent", extent}, {"count", count}};
  const PhaseGrid pg = centered_phase_grid(extent, count);
  PhaseMap map = bargmann_transform(u, pg);

  const bool compare = bool_or(cfg, "compare_closed_form", false, "config");
  resolved["compare_closed_form"] = compare;

  json report;
  report["scenario"] = "bargmann-map";
  report["l2_norm"] = l2_norm(u);
  double sup = 0.0;
  for (const cplx& z : map.values) sup = std::max(sup, std::abs(z));
  report["map_sup_magnitude"] = sup;

  if (compare) {
    const json& an = obj_or_empty(cfg, "annulus", empty_object(), "config");
    check_keys(an, {"inner", "outer"}, "annulus");
    const double inner = num_or(an, "inner", 4.0, "annulus");
    const double outer = num_or(an, "outer", 16.0, "annulus");
    resolved["annulus"] = {{"inner", inner}, {"outer", outer}};
    // Closed forms exist for the pure catalog signals only; a windowed or
    // file datum surfaces UnsupportedSignal here.
    const json& d = cfg["datum"];
    SignalSpec spec;
    const std::string type = str_at(d, "type", "datum");
    if (type == "constant") spec = SignalSpec::constant();
    else if (type == "gaussian") spec = SignalSpec::gaussian(num_or(d, "width", 1.0, "datum"));
    else if (type == "chirp") spec = SignalSpec::chirp(num_at(d, "slope", "datum"));
    else if (type == "hermite") spec = SignalSpec::hermite(int_at(d, "index", "datum"));
    else spec = SignalSpec::delta(num_or(d, "width", 0.05, "datum"));
    double err = 0.0;
    for (int i = 0; i < pg.x_count; ++i)
      for (int k = 0; k < pg.xi_count; ++k) {
        const double r = std::hypot(pg.x(i), pg.xi(k));
        if (r < inner || r > outer) continue;
        err = std::max(err, std::abs(map.magnitude(i, k) -
                                     closed_form_magnitude(spec, pg.x(i),
                                                           pg.xi(k))));
      }
    report["closed_form_sup_error"] = err;
  }

  write_phase_map_csv(map, (out / "map.csv").string());
  write_json_file(out / "report.json", report);
  write_manifest(out, "bargmann-map", seed, resolved,
                 {"map.csv", "report.json"}, "complete", 0);
  return {0, "complete", (out / "report.json").string()};
}

ScenarioOutcome scenario_wavefront(const json& cfg, const fs::path& out,
                                   unsigned long seed, double oL, int oN) {
  check_keys(cfg, {"grid", "datum", "detector"}, "config");
  json resolved;
  const GridSpec1D grid = parse_grid(cfg, oL, oN, resolved);
  const SampledField u = parse_datum(cfg, grid, resolved);
  const DetectionParams p = parse_detector(cfg, resolved);

  const WavefrontReport rep = detect_wavefront(u, p);
  write_wavefront_report_json(rep, (out / "report.json").string());
  write_manifest(out, "wavefront", seed, resolved, {"report.json"},
                 "complete", 0);
  return {0, "complete", (out / "report.json").string()};
}

ScenarioOutcome scenario_flow(const json& cfg, const fs::path& out,
                              unsigned long seed) {
  check_keys(cfg, {"hamiltonian", "t", "z0", "numeric"}, "config");
  json resolved;
  const HamiltonianSpec spec = parse_hamiltonian(cfg, resolved);
  if (spec.type == "potential")
    throw ConfigError("flow requires a quadratic hamiltonian");
  const QuadraticHamiltonian q = to_quadratic(spec);

  const double t = num_at(cfg, "t", "config");
  const std::vector<double> z0v = num_array(member(cfg, "z0", "config"), "z0");
  if (z0v.size() != 2)
    throw ConfigError("z0 must be [x, xi]");
  Eigen::VectorXd z0(2);
  z0 << z0v[0], z0v[1];
  resolved["t"] = t;
  resolved["z0"] = z0v;

  const FlowResult fr = flow_quadratic(q, t, z0);
  json report;
  report["scenario"] = "flow";
  report["endpoint"] = {fr.endpoint(0), fr.endpoint(1)};
  report["jacobian"] = {{fr.jacobian(0, 0), fr.jacobian(0, 1)},
                        {fr.jacobian(1, 0), fr.jacobian(1, 1)}};
  const Eigen::MatrixXd Om = symplectic_form(1);
  report["symplectic_defect"] =
      (fr.jacobian.transpose() * Om * fr.jacobian - Om).norm();
  const double theta0 = wrap_angle(std::atan2(z0v[1], z0v[0]));
  report["direction"] = {{"theta_0", theta0},
                         {"theta_t", direction_map(q, t, theta0)}};

  if (auto it = cfg.find("numeric"); it != cfg.end()) {
    check_keys(*it, {"dt"}, "numeric");
    const double dt = num_at(*it, "dt", "numeric");
    resolved["numeric"] = {{"dt", dt}};
    const Eigen::MatrixXd A = q.A;
    HamiltonianField hf = make_field(
        1,
        [A](double, const Eigen::VectorXd& z) { return 0.5 * z.dot(A * z); },
        [A](double, const Eigen::VectorXd& z) -> Eigen::VectorXd {
          return A * z;
        },
        0.0, t);
    const FlowResult nr = flow_numeric(hf, 0.0, t, z0, dt);
    report["numeric"] = {
        {"endpoint", {nr.endpoint(0), nr.endpoint(1)}},
        {"error", (nr.endpoint - fr.endpoint).norm()}};
  }

  write_json_file(out / "report.json", report);
  write_manifest(out, "flow", seed, resolved, {"report.json"}, "complete", 0);
  return {0, "complete", (out / "report.json").string()};
}

ScenarioOutcome scenario_evolve(const json& cfg, const fs::path& out,
                                unsigned long seed, double oL, int oN) {
  check_keys(cfg,
             {"grid", "datum", "hamiltonian", "nonlinearity", "t_final", "dt",
              "snapshots", "backend", "hermite_modes"},
             "config");
  json resolved;
  const GridSpec1D grid = parse_grid(cfg, oL, oN, resolved);
  const SampledField u0 = parse_datum(cfg, grid, resolved);
  const HamiltonianSpec hspec = parse_hamiltonian(cfg, resolved);

  EvolutionConfig ec;
  fill_hamiltonian(hspec, grid, ec);
  ec.nonlinearity = parse_nonlinearity(cfg, "nonlinearity", resolved);
  ec.t_final = num_at(cfg, "t_final", "config");
  ec.dt = num_at(cfg, "dt", "config");
  if (auto it = cfg.find("snapshots"); it != cfg.end())
    ec.snapshot_times = num_array(*it, "snapshots");
  const std::string backend =
      str_or(cfg, "backend", "fractional_fourier", "config");
  if (backend == "fractional_fourier") {
    ec.backend = LinearBackend::fractional_fourier;
  } else if (backend == "hermite") {
    ec.backend = LinearBackend::hermite;
  } else {
    throw ConfigError("backend '" + backend + "' is not known");
  }
  ec.hermite_modes = int_or(cfg, "hermite_modes", 0, "config");
  resolved["t_final"] = ec.t_final;
  resolved["dt"] = ec.dt;
  resolved["snapshots"] = ec.snapshot_times;
  resolved["backend"] = backend;
  resolved["hermite_modes"] = ec.hermite_modes;

  const EvolutionTrace trace = propagate_strang(u0, ec);

  std::vector<std::string> artifacts;
  for (size_t s = 0; s < trace.snapshots.size(); ++s) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%03zu.csv", s);
    write_signal_csv(trace.snapshots[s], (out / name).string());
    artifacts.push_back(name);
  }

  std::string diag = "# phasefront diagnostics t,l2,energy\n";
  for (size_t i = 0; i < trace.step_times.size(); ++i)
    diag += csv_row({trace.step_times[i], trace.l2_norms[i],
                     trace.energies[i]});
  write_text(out / "diagnostics.csv", diag);
  artifacts.push_back("diagnostics.csv");

  json report;
  report["scenario"] = "evolve";
  report["initial_l2"] = trace.initial_l2;
  report["final_l2"] = trace.l2_norms.back();
  report["l2_drift"] =
      std::abs(trace.l2_norms.back() - trace.initial_l2) / trace.initial_l2;
  report["initial_energy"] = trace.energies.front();
  report["final_energy"] = trace.energies.back();
  report["steps"] = trace.step_times.size() - 1;
  report["snapshot_times"] = trace.snapshot_times;
  json warn = json::array();
  for (const auto& w : trace.warnings) warn.push_back(w);
  report["warnings"] = warn;
  write_json_file(out / "report.json", report);
  artifacts.push_back("report.json");

  write_manifest(out, "evolve", seed, resolved, artifacts, "complete", 0);
  return {0, "complete", (out / "report.json").string()};
}

ScenarioOutcome scenario_propagation_check(const json& cfg,
                                           const fs::path& out,
                                           unsigned long seed, double oL,
                                           int oN) {
  check_keys(cfg,
             {"grid", "datum", "hamiltonian", "times", "detector",
              "tolerance_bins", "dt"},
             "config");
  json resolved;
  const GridSpec1D grid = parse_grid(cfg, oL, oN, resolved);
  const SampledField u0 = parse_datum(cfg, grid, resolved);
  const HamiltonianSpec hspec = parse_hamiltonian(cfg, resolved);
  if (hspec.type == "potential")
    throw ConfigError(
        "propagation-check requires a quadratic hamiltonian (the flow of a "
        "general potential has no direction map)");
  const QuadraticHamiltonian q = to_quadratic(hspec);
  const DetectionParams p = parse_detector(cfg, resolved);

  const std::vector<double> times =
      num_array(member(cfg, "times", "config"), "times");
  if (times.empty()) throw ConfigError("times must be nonempty");
  for (double t : times)
    if (!(t >= 0.0) || !std::isfinite(t))
      throw ConfigError("times must be finite and nonnegative");
  const double tol_bins = num_or(cfg, "tolerance_bins", 1.0, "config");
  const double dt = num_or(cfg, "dt", 1e-2, "config");
  resolved["times"] = times;
  resolved["tolerance_bins"] = tol_bins;
  resolved["dt"] = dt;

  const WavefrontReport rep0 = detect_wavefront(u0, p);
  const double tol = tol_bins * 2.0 * kPi / p.angular_bins;

  json per_time = json::array();
  bool pass = true;
  for (double t : times) {
    SampledField ut = u0;
    if (t != 0.0) {
      if (hspec.type == "harmonic_oscillator") {
        ut = ho_fractional_step(u0, t);
      } else {
        EvolutionConfig ec;
        fill_hamiltonian(hspec, grid, ec);
        ec.t_final = t;
        ec.dt = dt;
        ec.snapshot_times = {t};
        ut = propagate_strang(u0, ec).snapshots.at(0);
      }
    }
    const WavefrontReport rept = detect_wavefront(ut, p);
    const MatchResult mr = compare_to_flow(
        rep0, rept, [&](double theta) { return direction_map(q, t, theta); },
        tol);
    const bool ok = mr.all_matched && mr.extraneous.empty();
    pass = pass && ok;

    json matches = json::array();
    for (const auto& dm : mr.matches)
      matches.push_back({{"source", dm.source},
                         {"mapped", dm.mapped},
                         {"matched", dm.matched},
                         {"ok", dm.ok}});
    per_time.push_back({{"t", t},
                        {"detected", directions_json(rept.singular_directions)},
                        {"matches", matches},
                        {"extraneous", directions_json(mr.extraneous)},
                        {"ok", ok}});
  }

  json report;
  report["scenario"] = "propagation-check";
  report["initial_directions"] = directions_json(rep0.singular_directions);
  report["tolerance"] = tol;
  report["times"] = per_time;
  report["pass"] = pass;
  write_json_file(out / "report.json", report);

  const std::string status = pass ? "pass" : "fail";
  const int code = pass ? 0 : 1;
  write_manifest(out, "propagation-check", seed, resolved, {"report.json"},
                 status, code);
  return {code, status, (out / "report.json").string()};
}

ScenarioOutcome scenario_anomaly_demo(const json& cfg, const fs::path& out,
                                      unsigned long seed, double oL, int oN) {
  check_keys(cfg,
             {"grid", "datum", "operation", "sigma", "theta", "detector",
              "tolerance_bins"},
             "config");
  json resolved;
  const GridSpec1D grid = parse_grid(cfg, oL, oN, resolved);
  const SampledField u = parse_datum(cfg, grid, resolved);
  const Nonlinearity F = parse_nonlinearity(cfg, "operation", resolved);
  const DetectionParams p = parse_detector(cfg, resolved);
  const double sigma = num_or(cfg, "sigma", 1.0, "config");
  const double tol_bins = num_or(cfg, "tolerance_bins", 2.0, "config");

  double theta;
  if (auto it = cfg.find("theta"); it != cfg.end()) {
    if (!it->is_number()) throw ConfigError("config.theta must be a number");
    theta = it->get<double>();
  } else if (str_at(cfg["datum"], "type", "datum") == "chirp" &&
             F.name == "square") {
    // Squaring doubles a chirp's slope; the new singular direction is the
    // doubled-slope line.
    theta = std::atan(2.0 * num_at(cfg["datum"], "slope", "datum"));
  } else {
    throw ConfigError(
        "config.theta is required unless the datum is a chirp under the "
        "square rule");
  }
  resolved["sigma"] = sigma;
  resolved["theta"] = theta;
  resolved["tolerance_bins"] = tol_bins;

  const CompositionReport rep =
      microlocal_composition_check(u, F, sigma, theta, p);
  const double tol = tol_bins * 2.0 * kPi / p.angular_bins;
  double nearest = -1.0;
  for (double d : rep.anomalous_directions) {
    const double dist = std::min(circular_distance(d, rep.theta),
                                 circular_distance(d, rep.theta + kPi));
    if (nearest < 0.0 || dist < nearest) nearest = dist;
  }
  const bool pass = !rep.anomalous_directions.empty() && nearest <= tol;

  json report;
  report["scenario"] = "anomaly-demo";
  report["sigma"] = rep.sigma;
  report["theta"] = rep.theta;
  report["input_regular"] = rep.input_regular;
  report["output_regular"] = rep.output_regular;
  report["input_directions"] = directions_json(rep.input_directions);
  report["output_directions"] = directions_json(rep.output_directions);
  report["anomalous_directions"] =
      directions_json(rep.anomalous_directions);
  report["nearest_anomaly_distance"] = nearest;
  report["tolerance"] = tol;
  report["pass"] = pass;
  write_json_file(out / "report.json", report);

  const std::string status = pass ? "pass" : "fail";
  const int code = pass ? 0 : 1;
  write_manifest(out, "anomaly-demo", seed, resolved, {"report.json"}, status,
                 code);
  return {code, status, (out / "report.json").string()};
}

ScenarioOutcome scenario_paradiff_probe(const json& cfg, const fs::path& out,
                                        unsigned long seed, double oL,
                                        int oN) {
  check_keys(cfg,
             {"grid", "datum", "nonlinearity", "levels", "delta", "seminorm",
              "moser"},
             "config");
  json resolved;
  const GridSpec1D grid = parse_grid(cfg, oL, oN, resolved);
  const SampledField u = parse_datum(cfg, grid, resolved);
  const Nonlinearity F = parse_nonlinearity(cfg, "nonlinearity", resolved);
  const int K = int_at(cfg, "levels", "config");
  const double delta = num_at(cfg, "delta", "config");
  resolved["levels"] = K;
  resolved["delta"] = delta;

  const json& sn = obj_or_empty(cfg, "seminorm", empty_object(), "config");
  check_keys(sn, {"rho", "alpha", "beta"}, "seminorm");
  const double rho = num_or(sn, "rho", 1.0, "seminorm");
  const int alpha = int_or(sn, "alpha", 0, "seminorm");
  const int beta = int_or(sn, "beta", 0, "seminorm");
  resolved["seminorm"] = {{"rho", rho}, {"alpha", alpha}, {"beta", beta}};

  const ParadiffDecomposition d = build_paradiff(u, F, K, delta);
  write_paradiff_summary_json(d, (out / "summary.json").string());

  json report;
  report["scenario"] = "paradiff-probe";
  const SeminormFit fs = seminorm_probe(d.sharp, alpha, beta, 0.0, rho, delta);
  const SeminormFit ff = seminorm_probe(d.flat, alpha, beta, 0.0, rho, delta);
  report["sharp_seminorm"] = {{"annulus_sups", fs.annulus_sups},
                              {"slope", fs.slope}};
  report["flat_seminorm"] = {{"annulus_sups", ff.annulus_sups},
                             {"slope", ff.slope}};

  const json& mo = obj_or_empty(cfg, "moser", empty_object(), "config");
  check_keys(mo, {"trials", "band", "envelope_width", "sobolev_order"},
             "moser");
  const int trials = int_or(mo, "trials", 0, "moser");
  const double band = num_or(mo, "band", 4.0, "moser");
  const double env = num_or(mo, "envelope_width", 6.0, "moser");
  const double order = num_or(mo, "sobolev_order", 2.0, "moser");
  resolved["moser"] = {{"trials", trials},
                       {"band", band},
                       {"envelope_width", env},
                       {"sobolev_order", order}};
  if (trials > 0) {
    // Randomized norm-ratio probe |F(u)|_{H_G^s} / |u|_{H_G^s} over
    // sup-normalized band-limited draws; the seed pins the draws.
    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    std::normal_distribution<double> gauss(0.0, 1.0);
    json ratios = json::array();
    for (int trial = 0; trial < trials; ++trial) {
      SampledField fhat{grid, Domain::frequency,
                        std::vector<cplx>(grid.sample_count, cplx(0.0, 0.0))};
      for (int m = 0; m < grid.sample_count; ++m)
        if (std::abs(grid.xi(m)) <= band)
          fhat.values[m] = cplx(gauss(rng), gauss(rng));
      SampledField w = inverse_transform(fhat);
      for (int j = 0; j < grid.sample_count; ++j)
        w.values[j] *= std::exp(-grid.x(j) * grid.x(j) / (2.0 * env * env));
      double sup = 0.0;
      for (const cplx& z : w.values) sup = std::max(sup, std::abs(z));
      for (cplx& z : w.values) z /= sup;
      ratios.push_back(qs_norm(apply_pointwise(F, w), order) /
                       qs_norm(w, order));
    }
    report["moser_ratios"] = ratios;
  }

  write_json_file(out / "report.json", report);
  write_manifest(out, "paradiff-probe", seed, resolved,
                 {"summary.json", "report.json"}, "complete", 0);
  return {0, "complete", (out / "report.json").string()};
}

}  // namespace

ScenarioOutcome run_scenario(const std::string& scenario,
                             const std::string& config_text,
                             const std::string& out_dir, unsigned long seed,
                             double half_width_override, int sample_override) {
  json cfg;
  try {
    cfg = json::parse(config_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) throw ConfigError("config must be a JSON object");

  fs::path out(out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec && !fs::is_directory(out))
    throw FileFormatError("cannot create output directory " + out.string());

  if (scenario == "bargmann-map")
    return scenario_bargmann_map(cfg, out, seed, half_width_override,
                                 sample_override);
  if (scenario == "wavefront")
    return scenario_wavefront(cfg, out, seed, half_width_override,
                              sample_override);
  if (scenario == "flow") return scenario_flow(cfg, out, seed);
  if (scenario == "evolve")
    return scenario_evolve(cfg, out, seed, half_width_override,
                           sample_override);
  if (scenario == "propagation-check")
    return scenario_propagation_check(cfg, out, seed, half_width_override,
                                      sample_override);
  if (scenario == "anomaly-demo")
    return scenario_anomaly_demo(cfg, out, seed, half_width_override,
                                 sample_override);
  if (scenario == "paradiff-probe")
    return scenario_paradiff_probe(cfg, out, seed, half_width_override,
                                   sample_override);
  throw ConfigError("unknown scenario '" + scenario + "'");
}

}  // namespace phasefront
