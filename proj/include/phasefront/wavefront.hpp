#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "phasefront/bargmann.hpp"
#include "phasefront/field.hpp"

// Direction-resolved singularity detection on phase-space maps.
//
// A direction theta is "regular" when |Tu| decays rapidly inside a thin
// truncated cone around theta: we fit the slope of log sup|Tu| against log r
// over log-spaced radial shells and compare against a threshold. Weighted-mass
// (Sobolev-type) scores decide regularity at finite smoothness s by how the
// sector mass grows when the outer radius is pushed out.
namespace phasefront {

// Truncated cone {z : |angle(z) - direction| < half_width, inner < |z| < outer}.
struct ConicSector {
  double direction = 0.0;    // radians in [0, 2*pi)
  double half_width = 0.0;   // radians, in (0, pi/4)
  double inner_radius = 0.0;
  double outer_radius = 0.0;
};

// Validates the invariants and normalizes direction into [0, 2*pi).
ConicSector make_sector(double direction, double half_width, double inner_radius,
                        double outer_radius);

// Angle helpers (radians). wrap_angle maps into [0, 2*pi); circular_distance
// is the geodesic distance on the circle, in [0, pi].
double wrap_angle(double theta);
double circular_distance(double a, double b);

struct DecayFitParams {
  int shell_count = 12;     // log-spaced shells between the sector radii
  double floor_rel = 1e-12; // shells with sup below floor_rel * max|map| are
                            // treated as numerically zero (censored)
  double n_max = 8.0;       // decay order the sentinel slope -(n_max+4) encodes
};

// Least-squares slope of log sup|Tu| versus log r over the sector's shells,
// plus the rms fit residual. Censored shells are excluded from the fit; if any
// shell is censored the slope is clamped to at most -(n_max+4), and if fewer
// than two shells survive the sentinel -(n_max+4) is returned outright (decay
// too fast to measure on this map).
//   errors: InsufficientCoverage if shell_count < 8, the sector leaves the
//           map's coverage, or some shell contains no grid node.
std::pair<double, double> directional_decay(const PhaseMap& map, const ConicSector& sector,
                                            const DecayFitParams& fit = {});

// Discrete integral of |z|^{2s} |Tu(z)|^2 over the sector (Cartesian cell
// measure). errors: InsufficientCoverage if the sector leaves the map or
// contains no nodes.
double sobolev_score(const PhaseMap& map, const ConicSector& sector, double s);

struct DetectionParams {
  int angular_bins = 64;
  double sector_half_width = 0.0;  // 0 = auto: 0.4 * (2*pi / angular_bins)
  double inner_radius = 16.0;      // decay-fit annulus
  double outer_radius = 32.0;
  int shell_count = 12;
  double n_max = 8.0;
  double n_threshold = 3.0;        // singular iff fitted slope > -n_threshold
  double probe_spacing = 0.1;      // phase-grid spacing used by detect_wavefront
  double probe_margin = 0.5;       // probe extent = outer_radius + probe_margin
  double floor_rel = 1e-12;
  std::vector<double> sobolev_orders;             // s values to score (may be empty)
  double growth_inner = 4.0;                      // weighted-mass annuli start here
  std::vector<double> growth_radii = {8.0, 12.0, 16.0};  // nested outer radii
  double growth_threshold = 0.2;   // growth exponent above this => s-singular

  double resolved_half_width() const;
};

struct AngularBin {
  double theta = 0.0;            // bin center
  double decay_exponent = 0.0;   // fitted slope
  double fit_residual = 0.0;
  bool singular = false;
  std::vector<double> sobolev_scores;  // per requested s, at the largest growth radius
  std::vector<double> sobolev_growth;  // per requested s, slope of log score vs log R
};

struct WavefrontReport {
  DetectionParams params;
  std::vector<AngularBin> bins;              // bin b centered at b * 2*pi/bins
  std::vector<double> singular_directions;   // centers of decay-singular bins
  std::vector<std::vector<double>> sobolev_singular;  // per s: growth-singular centers
};

// Runs the detector on every angular bin of a phase map (single pass over the
// map's nodes; identical numbers to per-bin directional_decay/sobolev_score
// calls). The map must cover the annulus |z| < outer_radius and the growth
// radii.
WavefrontReport detect_wavefront(const PhaseMap& map, const DetectionParams& params = {});

// Convenience: computes the map on a centered square phase grid of spacing
// probe_spacing and extent outer_radius + probe_margin, then detects. Errors
// propagate from the transform (WindowOverrun, NyquistViolation).
WavefrontReport detect_wavefront(const SampledField& u, const DetectionParams& params = {});

struct MatchResult {
  struct DirectionMatch {
    double source = 0.0;   // singular direction in the initial report
    double mapped = 0.0;   // its image under the flow's direction map
    double matched = 0.0;  // the report_t direction that matched (if ok)
    bool ok = false;
  };
  std::vector<DirectionMatch> matches;
  std::vector<double> extraneous;  // report_t singular directions near no image
  bool all_matched = false;        // every source direction found a partner
};

// Checks that the singular directions of report_t sit where the flow carries
// those of report_0: each source direction theta must have some report_t
// direction within tol radians (circularly) of flow_dir(theta); report_t
// directions matching no image are listed as extraneous.
//   errors: BinningMismatch when the two reports use different binnings.
MatchResult compare_to_flow(const WavefrontReport& report_0, const WavefrontReport& report_t,
                            const std::function<double(double)>& flow_dir, double tol);

}  // namespace phasefront
