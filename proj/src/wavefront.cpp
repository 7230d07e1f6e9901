#include "phasefront/wavefront.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace phasefront {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

// True when alpha lies in the arc [lo, lo + width] (angles mod 2*pi).
bool contains_angle(double lo, double width, double alpha) {
  return wrap_angle(alpha - lo) <= width;
}

struct Box {
  double x_lo, x_hi, xi_lo, xi_hi;
};

// Axis-aligned bounding box of a sector: extremes sit at the four corners or
// where cos/sin peak inside the angular interval.
Box sector_bbox(const ConicSector& s) {
  const double lo = s.direction - s.half_width;
  const double width = 2.0 * s.half_width;
  Box b{1e300, -1e300, 1e300, -1e300};
  const double angles[2] = {lo, lo + width};
  const double radii[2] = {s.inner_radius, s.outer_radius};
  for (double a : angles) {
    for (double r : radii) {
      b.x_lo = std::min(b.x_lo, r * std::cos(a));
      b.x_hi = std::max(b.x_hi, r * std::cos(a));
      b.xi_lo = std::min(b.xi_lo, r * std::sin(a));
      b.xi_hi = std::max(b.xi_hi, r * std::sin(a));
    }
  }
  if (contains_angle(lo, width, 0.0)) b.x_hi = s.outer_radius;
  if (contains_angle(lo, width, kPi)) b.x_lo = -s.outer_radius;
  if (contains_angle(lo, width, 0.5 * kPi)) b.xi_hi = s.outer_radius;
  if (contains_angle(lo, width, 1.5 * kPi)) b.xi_lo = -s.outer_radius;
  return b;
}

void check_sector_coverage(const PhaseMap& map, const ConicSector& s) {
  const Box b = sector_bbox(s);
  const PhaseGrid& g = map.grid;
  const double tol = 1e-9 * std::max(1.0, s.outer_radius);
  if (b.x_lo < g.x_min - tol || b.x_hi > g.x_max + tol || b.xi_lo < g.xi_min - tol ||
      b.xi_hi > g.xi_max + tol) {
    throw InsufficientCoverage("sector at direction " + std::to_string(s.direction) +
                               " with outer radius " + std::to_string(s.outer_radius) +
                               " leaves the map coverage");
  }
}

double map_abs_max(const PhaseMap& map) {
  double m = 0.0;
  for (const cplx& v : map.values) m = std::max(m, std::abs(v));
  return m;
}

// Membership rule shared by every scan: angular offset in [-half_width,
// +half_width) (lower-closed, so boundary nodes resolve downward) and radius
// strictly inside (inner, outer).
bool in_sector(const ConicSector& s, double r, double theta) {
  if (!(r > s.inner_radius && r < s.outer_radius)) return false;
  double d = wrap_angle(theta - s.direction);
  if (d >= kPi) d -= kTwoPi;
  return d >= -s.half_width && d < s.half_width;
}

struct FitResult {
  double slope = 0.0;
  double residual = 0.0;
};

// Least-squares line through (log r_k, log sup_k) over uncensored shells; the
// sentinel is used when decay outruns the floor.
FitResult censored_fit(const std::vector<double>& rbar, const std::vector<double>& sups,
                       double floor_abs, double n_max) {
  const double sentinel = -(n_max + 4.0);
  std::vector<double> xs, ys;
  bool censored = false;
  for (size_t k = 0; k < sups.size(); ++k) {
    if (sups[k] > floor_abs && sups[k] > 0.0) {
      xs.push_back(std::log(rbar[k]));
      ys.push_back(std::log(sups[k]));
    } else {
      censored = true;
    }
  }
  FitResult out;
  if (xs.size() < 2) {
    out.slope = sentinel;
    out.residual = 0.0;
    return out;
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  out.slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - out.slope * sx) / n;
  double rss = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double d = ys[i] - (out.slope * xs[i] + intercept);
    rss += d * d;
  }
  out.residual = std::sqrt(rss / n);
  if (censored) out.slope = std::min(out.slope, sentinel);
  return out;
}

std::vector<double> shell_bounds(double r0, double r1, int shells) {
  std::vector<double> s(shells + 1);
  for (int k = 0; k <= shells; ++k) {
    s[k] = r0 * std::pow(r1 / r0, static_cast<double>(k) / shells);
  }
  return s;
}

void validate_detection(const DetectionParams& p) {
  if (p.angular_bins < 16) {
    throw DimensionMismatch("detection needs at least 16 angular bins, got " +
                            std::to_string(p.angular_bins));
  }
  if (!(p.inner_radius > 0.0) || !(p.outer_radius > p.inner_radius)) {
    throw DimensionMismatch("detection radii must satisfy 0 < inner < outer");
  }
  if (p.shell_count < 8) {
    throw InsufficientCoverage("decay fit needs at least 8 shells, got " +
                               std::to_string(p.shell_count));
  }
  const double eps = p.resolved_half_width();
  if (!(eps > 0.0) || !(eps < 0.25 * kPi)) {
    throw DimensionMismatch("sector half-width must lie in (0, pi/4)");
  }
  if (!(p.probe_spacing > 0.0) || !(p.probe_margin >= 0.0)) {
    throw DimensionMismatch("probe spacing must be positive");
  }
  if (!p.sobolev_orders.empty()) {
    if (p.growth_radii.size() < 2) {
      throw InsufficientCoverage("growth fit needs at least two nested radii");
    }
    double prev = p.growth_inner;
    if (!(prev > 0.0)) throw DimensionMismatch("growth inner radius must be positive");
    for (double r : p.growth_radii) {
      if (!(r > prev)) {
        throw DimensionMismatch("growth radii must increase beyond the inner radius");
      }
      prev = r;
    }
  }
}

}  // namespace

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;  // fmod rounding at the seam
  return t;
}

double circular_distance(double a, double b) {
  double d = std::abs(wrap_angle(a) - wrap_angle(b));
  return std::min(d, kTwoPi - d);
}

ConicSector make_sector(double direction, double half_width, double inner_radius,
                        double outer_radius) {
  if (!(half_width > 0.0) || !(half_width < 0.25 * kPi)) {
    throw DimensionMismatch("sector half-width must lie in (0, pi/4), got " +
                            std::to_string(half_width));
  }
  if (!(inner_radius > 0.0) || !(outer_radius > inner_radius)) {
    throw DimensionMismatch("sector radii must satisfy 0 < inner < outer");
  }
  return ConicSector{wrap_angle(direction), half_width, inner_radius, outer_radius};
}

double DetectionParams::resolved_half_width() const {
  return sector_half_width > 0.0 ? sector_half_width : 0.4 * (kTwoPi / angular_bins);
}

std::pair<double, double> directional_decay(const PhaseMap& map, const ConicSector& sector,
                                            const DecayFitParams& fit) {
  if (fit.shell_count < 8) {
    throw InsufficientCoverage("decay fit needs at least 8 shells, got " +
                               std::to_string(fit.shell_count));
  }
  check_sector_coverage(map, sector);
  const std::vector<double> bounds =
      shell_bounds(sector.inner_radius, sector.outer_radius, fit.shell_count);
  std::vector<double> sups(fit.shell_count, 0.0);
  std::vector<bool> seen(fit.shell_count, false);
  const PhaseGrid& g = map.grid;
  const double inv_log_ratio =
      fit.shell_count / std::log(sector.outer_radius / sector.inner_radius);
  for (int i = 0; i < g.x_count; ++i) {
    const double x = g.x(i);
    for (int k = 0; k < g.xi_count; ++k) {
      const double xi = g.xi(k);
      const double r = std::hypot(x, xi);
      const double theta = wrap_angle(std::atan2(xi, x));
      if (!in_sector(sector, r, theta)) continue;
      int sh = static_cast<int>(inv_log_ratio * std::log(r / sector.inner_radius));
      sh = std::clamp(sh, 0, fit.shell_count - 1);
      seen[sh] = true;
      sups[sh] = std::max(sups[sh], std::abs(map.at(i, k)));
    }
  }
  for (int k = 0; k < fit.shell_count; ++k) {
    if (!seen[k]) {
      throw InsufficientCoverage("shell " + std::to_string(k) + " of sector at " +
                                 std::to_string(sector.direction) +
                                 " holds no grid node; refine the probe grid");
    }
  }
  std::vector<double> rbar(fit.shell_count);
  for (int k = 0; k < fit.shell_count; ++k) rbar[k] = std::sqrt(bounds[k] * bounds[k + 1]);
  const FitResult r = censored_fit(rbar, sups, fit.floor_rel * map_abs_max(map), fit.n_max);
  return {r.slope, r.residual};
}

double sobolev_score(const PhaseMap& map, const ConicSector& sector, double s) {
  check_sector_coverage(map, sector);
  const PhaseGrid& g = map.grid;
  double acc = 0.0;
  bool seen = false;
  for (int i = 0; i < g.x_count; ++i) {
    const double x = g.x(i);
    for (int k = 0; k < g.xi_count; ++k) {
      const double xi = g.xi(k);
      const double r = std::hypot(x, xi);
      const double theta = wrap_angle(std::atan2(xi, x));
      if (!in_sector(sector, r, theta)) continue;
      seen = true;
      acc += std::pow(r, 2.0 * s) * std::norm(map.at(i, k));
    }
  }
  if (!seen) {
    throw InsufficientCoverage("sector at " + std::to_string(sector.direction) +
                               " holds no grid node");
  }
  return acc * g.x_step() * g.xi_step();
}

WavefrontReport detect_wavefront(const PhaseMap& map, const DetectionParams& params) {
  validate_detection(params);
  const int B = params.angular_bins;
  const int S = params.shell_count;
  const double w = kTwoPi / B;
  const double eps = params.resolved_half_width();

  // Coverage: the detector needs the full annulus plus the growth radii.
  {
    const double need = std::max(
        params.outer_radius,
        params.sobolev_orders.empty() ? 0.0 : params.growth_radii.back());
    const PhaseGrid& g = map.grid;
    const double tol = 1e-9 * need;
    if (g.x_min > -need + tol || g.x_max < need - tol || g.xi_min > -need + tol ||
        g.xi_max < need - tol) {
      throw InsufficientCoverage("map does not cover the |z| < " + std::to_string(need) +
                                 " annulus needed by the detector");
    }
  }

  const int ns = static_cast<int>(params.sobolev_orders.size());
  const int ng = ns > 0 ? static_cast<int>(params.growth_radii.size()) : 0;
  const std::vector<double> bounds =
      shell_bounds(params.inner_radius, params.outer_radius, S);
  const double inv_log_ratio = S / std::log(params.outer_radius / params.inner_radius);
  const double growth_max = ng > 0 ? params.growth_radii.back() : 0.0;

  std::vector<double> sups(static_cast<size_t>(B) * S, 0.0);
  std::vector<bool> seen(static_cast<size_t>(B) * S, false);
  // sob[(b * ns + si) * ng + gi]: mass landing between growth radii gi-1 and gi.
  std::vector<double> sob(static_cast<size_t>(std::max(1, B * ns * ng)), 0.0);

  const PhaseGrid& g = map.grid;
  for (int i = 0; i < g.x_count; ++i) {
    const double x = g.x(i);
    for (int k = 0; k < g.xi_count; ++k) {
      const double xi = g.xi(k);
      const double r = std::hypot(x, xi);
      const bool want_decay = r > params.inner_radius && r < params.outer_radius;
      const bool want_sob = ns > 0 && r > params.growth_inner && r < growth_max;
      if (!want_decay && !want_sob) continue;
      const double theta = wrap_angle(std::atan2(xi, x));
      // Candidate bins whose sector [-eps, eps) around b*w contains theta.
      const int blo = static_cast<int>(std::ceil((theta - eps) / w - 1e-12));
      const int bhi = static_cast<int>(std::floor((theta + eps) / w + 1e-12));
      for (int b = blo; b <= bhi; ++b) {
        const double d = theta - b * w;
        if (!(d >= -eps && d < eps)) continue;
        const int bb = ((b % B) + B) % B;
        if (want_decay) {
          int sh = static_cast<int>(inv_log_ratio * std::log(r / params.inner_radius));
          sh = std::clamp(sh, 0, S - 1);
          const size_t idx = static_cast<size_t>(bb) * S + sh;
          seen[idx] = true;
          sups[idx] = std::max(sups[idx], std::abs(map.at(i, k)));
        }
        if (want_sob) {
          int gi = 0;
          while (gi < ng && !(r < params.growth_radii[gi])) ++gi;
          if (gi < ng) {
            const double v2 = std::norm(map.at(i, k));
            for (int si = 0; si < ns; ++si) {
              sob[(static_cast<size_t>(bb) * ns + si) * ng + gi] +=
                  std::pow(r, 2.0 * params.sobolev_orders[si]) * v2;
            }
          }
        }
      }
    }
  }

  for (int b = 0; b < B; ++b) {
    for (int sh = 0; sh < S; ++sh) {
      if (!seen[static_cast<size_t>(b) * S + sh]) {
        throw InsufficientCoverage("shell " + std::to_string(sh) + " of bin " +
                                   std::to_string(b) +
                                   " holds no grid node; refine the probe grid");
      }
    }
  }

  const double floor_abs = params.floor_rel * map_abs_max(map);
  const double cell = g.x_step() * g.xi_step();
  std::vector<double> rbar(S);
  for (int k = 0; k < S; ++k) rbar[k] = std::sqrt(bounds[k] * bounds[k + 1]);

  WavefrontReport report;
  report.params = params;
  report.bins.resize(B);
  report.sobolev_singular.assign(ns, {});
  for (int b = 0; b < B; ++b) {
    AngularBin& bin = report.bins[b];
    bin.theta = b * w;
    std::vector<double> binsups(sups.begin() + static_cast<size_t>(b) * S,
                                sups.begin() + static_cast<size_t>(b + 1) * S);
    const FitResult fr = censored_fit(rbar, binsups, floor_abs, params.n_max);
    bin.decay_exponent = fr.slope;
    bin.fit_residual = fr.residual;
    bin.singular = fr.slope > -params.n_threshold;
    if (bin.singular) report.singular_directions.push_back(bin.theta);
    for (int si = 0; si < ns; ++si) {
      // Nested scores: cumulative mass inside each growth radius.
      std::vector<double> scores(ng, 0.0);
      double run = 0.0;
      for (int gi = 0; gi < ng; ++gi) {
        run += sob[(static_cast<size_t>(b) * ns + si) * ng + gi];
        scores[gi] = run * cell;
      }
      bin.sobolev_scores.push_back(scores[ng - 1]);
      // Growth exponent: slope of log score against log outer radius.
      double growth = 0.0;
      bool positive = true;
      for (double v : scores) positive = positive && v > 0.0;
      if (positive) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int gi = 0; gi < ng; ++gi) {
          const double lx = std::log(params.growth_radii[gi]);
          const double ly = std::log(scores[gi]);
          sx += lx;
          sy += ly;
          sxx += lx * lx;
          sxy += lx * ly;
        }
        growth = (ng * sxy - sx * sy) / (ng * sxx - sx * sx);
      }
      bin.sobolev_growth.push_back(growth);
      if (growth > params.growth_threshold) {
        report.sobolev_singular[si].push_back(bin.theta);
      }
    }
  }
  return report;
}

WavefrontReport detect_wavefront(const SampledField& u, const DetectionParams& params) {
  validate_detection(params);
  const double extent = params.outer_radius + params.probe_margin;
  const int half = static_cast<int>(std::round(extent / params.probe_spacing));
  const int n = 2 * half + 1;  // odd: keeps the axes on grid nodes
  const double e = half * params.probe_spacing;
  PhaseGrid pg = make_phase_grid(-e, e, n, -e, e, n);
  return detect_wavefront(bargmann_transform(u, pg), params);
}

MatchResult compare_to_flow(const WavefrontReport& report_0, const WavefrontReport& report_t,
                            const std::function<double(double)>& flow_dir, double tol) {
  if (report_0.params.angular_bins != report_t.params.angular_bins ||
      report_0.bins.size() != report_t.bins.size()) {
    throw BinningMismatch("reports use different angular binnings (" +
                          std::to_string(report_0.params.angular_bins) + " vs " +
                          std::to_string(report_t.params.angular_bins) + ")");
  }
  MatchResult out;
  out.all_matched = true;
  std::vector<double> images;
  for (double src : report_0.singular_directions) {
    MatchResult::DirectionMatch m;
    m.source = src;
    m.mapped = wrap_angle(flow_dir(src));
    images.push_back(m.mapped);
    double best = 1e300;
    for (double cand : report_t.singular_directions) {
      const double d = circular_distance(m.mapped, cand);
      if (d < best) {
        best = d;
        m.matched = cand;
      }
    }
    m.ok = best <= tol;
    if (!m.ok) out.all_matched = false;
    out.matches.push_back(m);
  }
  for (double cand : report_t.singular_directions) {
    double best = 1e300;
    for (double img : images) best = std::min(best, circular_distance(img, cand));
    if (best > tol) out.extraneous.push_back(cand);
  }
  return out;
}

}  // namespace phasefront
