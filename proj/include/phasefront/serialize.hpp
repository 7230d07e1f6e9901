#pragma once

#include <string>

#include "phasefront/field.hpp"

// File formats.
//
// Signal CSV: one header line "# phasefront signal L=<L> N=<N>", then N rows
// "<re>,<im>". Doubles are written with 17 significant digits (lossless).
//
// Phase map CSV: one header line
//   "# phasefront phasemap x=<min>:<max>:<count> xi=<min>:<max>:<count>",
// then row-major rows "<x>,<xi>,<magnitude>,<phase>" (x is the slow index).
//
// Phase map binary: little-endian, six float64 header words
//   x_min, x_max, x_count, xi_min, xi_max, xi_count
// followed by row-major float64 pairs (re, im) for every node.
namespace phasefront {

struct PhaseMap;
struct WavefrontReport;

void write_signal_csv(const SampledField& f, const std::string& path);

// Reads a signal CSV. The row count must match the header's N.
SampledField read_signal_csv(const std::string& path);

// Reads a signal CSV and checks the header grid against `grid`
// (exact N, L within 1e-12 relative); mismatch is a FileFormatError.
SampledField read_signal_csv(const std::string& path, const GridSpec1D& grid);

void write_phase_map_csv(const PhaseMap& m, const std::string& path);

// Binary roundtrip is bit-exact. read checks header sanity (counts >= 16,
// increasing ranges, payload size) and throws FileFormatError otherwise.
void write_phase_map_binary(const PhaseMap& m, const std::string& path);
PhaseMap read_phase_map_binary(const std::string& path);

// Detection report as JSON: the parameters echoed verbatim, one record per
// angular bin (theta, decay exponent, residual, singular flag, per-s scores
// and growth exponents), and the flagged direction lists. Key order is fixed,
// so equal reports serialize byte-identically.
void write_wavefront_report_json(const WavefrontReport& r, const std::string& path);

}  // namespace phasefront
