#include "phasefront/serialize.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "phasefront/bargmann.hpp"
#include "phasefront/wavefront.hpp"

namespace phasefront {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_signal_csv(const SampledField& f, const std::string& path) {
  if (f.domain != Domain::space) {
    throw DimensionMismatch("write_signal_csv expects a space-domain field");
  }
  std::ofstream out(path);
  if (!out) throw FileFormatError("cannot open " + path + " for writing");
  out << "# phasefront signal L=" << format_double(f.grid.half_width)
      << " N=" << f.grid.sample_count << "\n";
  for (const cplx& v : f.values) {
    out << format_double(v.real()) << "," << format_double(v.imag()) << "\n";
  }
  if (!out) throw FileFormatError("write failed for " + path);
}

SampledField read_signal_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileFormatError("cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw FileFormatError(path + ": missing header line");
  double L = 0.0;
  int N = 0;
  const auto lpos = header.find("L=");
  const auto npos = header.find("N=");
  if (lpos == std::string::npos || npos == std::string::npos ||
      std::sscanf(header.c_str() + lpos, "L=%lf", &L) != 1 ||
      std::sscanf(header.c_str() + npos, "N=%d", &N) != 1) {
    throw FileFormatError(path + ": header must name L and N, got '" + header + "'");
  }
  GridSpec1D grid = make_grid(L, N);
  SampledField f{grid, Domain::space, {}};
  f.values.reserve(N);
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double re = 0.0, im = 0.0;
    if (std::sscanf(line.c_str(), "%lf,%lf", &re, &im) != 2) {
      throw FileFormatError(path + ": row " + std::to_string(row) +
                            " is not 're,im', got '" + line + "'");
    }
    f.values.emplace_back(re, im);
    ++row;
  }
  if (row != N) {
    throw FileFormatError(path + ": header says N=" + std::to_string(N) + " but file has " +
                          std::to_string(row) + " rows");
  }
  return f;
}

void write_phase_map_csv(const PhaseMap& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FileFormatError("cannot open " + path + " for writing");
  const PhaseGrid& g = m.grid;
  out << "# phasefront phasemap x=" << format_double(g.x_min) << ":"
      << format_double(g.x_max) << ":" << g.x_count << " xi=" << format_double(g.xi_min)
      << ":" << format_double(g.xi_max) << ":" << g.xi_count << "\n";
  for (int i = 0; i < g.x_count; ++i) {
    for (int k = 0; k < g.xi_count; ++k) {
      const cplx v = m.at(i, k);
      out << format_double(g.x(i)) << "," << format_double(g.xi(k)) << ","
          << format_double(std::abs(v)) << "," << format_double(std::arg(v)) << "\n";
    }
  }
  if (!out) throw FileFormatError("write failed for " + path);
}

void write_phase_map_binary(const PhaseMap& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileFormatError("cannot open " + path + " for writing");
  const PhaseGrid& g = m.grid;
  const double header[6] = {g.x_min,  g.x_max,  static_cast<double>(g.x_count),
                            g.xi_min, g.xi_max, static_cast<double>(g.xi_count)};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  out.write(reinterpret_cast<const char*>(m.values.data()),
            static_cast<std::streamsize>(sizeof(cplx) * m.values.size()));
  if (!out) throw FileFormatError("write failed for " + path);
}

PhaseMap read_phase_map_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileFormatError("cannot open " + path);
  double header[6];
  if (!in.read(reinterpret_cast<char*>(header), sizeof(header))) {
    throw FileFormatError(path + ": truncated phase map header");
  }
  const double xc = header[2], kc = header[5];
  if (!(xc >= 16) || !(kc >= 16) || xc != std::floor(xc) || kc != std::floor(kc) ||
      xc > 1e9 || kc > 1e9) {
    throw FileFormatError(path + ": bad phase map counts");
  }
  PhaseMap m;
  m.grid = make_phase_grid(header[0], header[1], static_cast<int>(xc), header[3],
                           header[4], static_cast<int>(kc));
  m.values.resize(static_cast<size_t>(m.grid.node_count()));
  if (!in.read(reinterpret_cast<char*>(m.values.data()),
               static_cast<std::streamsize>(sizeof(cplx) * m.values.size()))) {
    throw FileFormatError(path + ": truncated phase map payload");
  }
  char extra;
  if (in.read(&extra, 1)) throw FileFormatError(path + ": trailing bytes after payload");
  m.provenance = "read from " + path;
  return m;
}

void write_wavefront_report_json(const WavefrontReport& r, const std::string& path) {
  using json = nlohmann::ordered_json;
  json j;
  const DetectionParams& p = r.params;
  j["params"] = {{"angular_bins", p.angular_bins},
                 {"sector_half_width", p.resolved_half_width()},
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
  j["bins"] = json::array();
  for (const AngularBin& b : r.bins) {
    json jb = {{"theta", b.theta},
               {"decay_exponent", b.decay_exponent},
               {"fit_residual", b.fit_residual},
               {"singular", b.singular}};
    if (!b.sobolev_scores.empty()) {
      jb["sobolev_scores"] = b.sobolev_scores;
      jb["sobolev_growth"] = b.sobolev_growth;
    }
    j["bins"].push_back(std::move(jb));
  }
  j["singular_directions"] = r.singular_directions;
  j["sobolev_singular"] = json::array();
  for (size_t si = 0; si < r.sobolev_singular.size(); ++si) {
    j["sobolev_singular"].push_back(
        {{"s", p.sobolev_orders[si]}, {"directions", r.sobolev_singular[si]}});
  }
  std::ofstream out(path);
  if (!out) throw FileFormatError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw FileFormatError("write failed for " + path);
}

SampledField read_signal_csv(const std::string& path, const GridSpec1D& grid) {
  SampledField f = read_signal_csv(path);
  const double ltol = 1e-12 * std::max(1.0, std::abs(grid.half_width));
  if (f.grid.sample_count != grid.sample_count ||
      std::abs(f.grid.half_width - grid.half_width) > ltol) {
    throw FileFormatError(path + ": grid mismatch (file L=" +
                          std::to_string(f.grid.half_width) + " N=" +
                          std::to_string(f.grid.sample_count) + ", expected L=" +
                          std::to_string(grid.half_width) + " N=" +
                          std::to_string(grid.sample_count) + ")");
  }
  return f;
}

}  // namespace phasefront
