#include "phasefront/bargmann.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace phasefront {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
// 2^{-1/2} pi^{-3/4}, the transform prefactor.
const double kPrefactor = std::pow(2.0, -0.5) * std::pow(kPi, -0.75);

struct WindowBounds {
  int lo = 0;
  int hi = -1;  // inclusive; empty if hi < lo
};

// Sample indices with |y_j - x| <= kWindowHalfWidth.
WindowBounds window_bounds(const GridSpec1D& g, double x) {
  const double h = g.spacing();
  WindowBounds b;
  b.lo = std::max(0, static_cast<int>(std::ceil((x - kWindowHalfWidth + g.half_width) / h)));
  b.hi = std::min(g.sample_count - 1,
                  static_cast<int>(std::floor((x + kWindowHalfWidth + g.half_width) / h)));
  return b;
}

void check_probe(const SampledField& u, double x_lo, double x_hi, double xi_lo,
                 double xi_hi) {
  if (static_cast<int>(u.values.size()) != u.grid.sample_count) {
    throw DimensionMismatch("field size does not match its grid");
  }
  if (u.domain != Domain::space) {
    throw DimensionMismatch("bargmann transform expects a space-domain field");
  }
  const double reach = std::max(std::abs(x_lo), std::abs(x_hi)) + kWindowHalfWidth;
  if (reach >= u.grid.half_width) {
    throw WindowOverrun("probe x-range plus window radius " + std::to_string(reach) +
                        " reaches beyond the field domain L=" +
                        std::to_string(u.grid.half_width));
  }
  const double band = u.grid.nyquist();
  if (std::max(std::abs(xi_lo), std::abs(xi_hi)) > band) {
    throw NyquistViolation("probe xi-range leaves the field band [-" +
                           std::to_string(band) + ", " + std::to_string(band) + "]");
  }
}

}  // namespace

PhaseGrid make_phase_grid(double x_min, double x_max, int x_count, double xi_min,
                          double xi_max, int xi_count) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !std::isfinite(xi_min) ||
      !std::isfinite(xi_max) || !(x_min < x_max) || !(xi_min < xi_max)) {
    throw DimensionMismatch("phase grid ranges must be finite and strictly increasing");
  }
  if (x_count < 16 || xi_count < 16) {
    throw DimensionMismatch("phase grid needs at least 16 nodes per axis, got " +
                            std::to_string(x_count) + " x " + std::to_string(xi_count));
  }
  return PhaseGrid{x_min, x_max, x_count, xi_min, xi_max, xi_count};
}

PhaseGrid centered_phase_grid(double extent, int count) {
  return make_phase_grid(-extent, extent, count, -extent, extent, count);
}

PhaseMap bargmann_transform(const SampledField& u, const PhaseGrid& pg) {
  check_probe(u, pg.x_min, pg.x_max, pg.xi_min, pg.xi_max);
  const GridSpec1D& g = u.grid;
  const double h = g.spacing();

  PhaseMap out;
  out.grid = pg;
  out.values.assign(pg.node_count(), cplx(0.0, 0.0));
  out.provenance = "bargmann window=" + std::to_string(kWindowHalfWidth) +
                   " trapezoid on L=" + std::to_string(g.half_width) +
                   " N=" + std::to_string(g.sample_count);

  std::vector<cplx> w;  // windowed row data: weight * exp(-(x-y)^2/2) * u * h
  for (int i = 0; i < pg.x_count; ++i) {
    const double x = pg.x(i);
    const WindowBounds b = window_bounds(g, x);
    const int len = b.hi - b.lo + 1;
    if (len <= 0) continue;
    w.assign(len, cplx(0.0, 0.0));
    for (int j = b.lo; j <= b.hi; ++j) {
      const double d = x - g.x(j);
      double weight = (j == b.lo || j == b.hi) ? 0.5 : 1.0;  // trapezoid ends
      w[j - b.lo] = weight * std::exp(-0.5 * d * d) * u.values[j] * h;
    }
    const double y0 = g.x(b.lo);
    cplx* row = out.values.data() + static_cast<size_t>(i) * pg.xi_count;
    for (int k = 0; k < pg.xi_count; ++k) {
      const double xi = pg.xi(k);
      // acc = sum_j w_j exp(-i y_j xi) by phasor recurrence; refresh the
      // phasor from scratch every 256 steps to stop drift.
      const cplx step = std::polar(1.0, -h * xi);
      cplx p = std::polar(1.0, -y0 * xi);
      cplx acc(0.0, 0.0);
      for (int j = 0; j < len; ++j) {
        if ((j & 255) == 0 && j != 0) p = std::polar(1.0, -(y0 + j * h) * xi);
        acc += w[j] * p;
        p *= step;
      }
      row[k] = kPrefactor * acc;
    }
  }
  return out;
}

cplx bargmann_point(const SampledField& u, double x, double xi) {
  check_probe(u, x, x, xi, xi);
  const GridSpec1D& g = u.grid;
  const double h = g.spacing();
  const WindowBounds b = window_bounds(g, x);
  cplx acc(0.0, 0.0);
  for (int j = b.lo; j <= b.hi; ++j) {
    const double y = g.x(j);
    const double d = x - y;
    const double weight = (j == b.lo || j == b.hi) ? 0.5 : 1.0;
    acc += weight * std::exp(-0.5 * d * d) * u.values[j] * std::polar(1.0, -y * xi);
  }
  return kPrefactor * h * acc;
}

double closed_form_magnitude(const SignalSpec& kind, double x, double xi) {
  const double quarter_root_pi = std::pow(kPi, -0.25);
  switch (kind.kind) {
    case SignalSpec::Kind::constant:
      return quarter_root_pi * std::exp(-0.5 * xi * xi);
    case SignalSpec::Kind::chirp: {
      const double s = kind.slope;
      const double r = xi - s * x;
      return quarter_root_pi * std::pow(1.0 + s * s, -0.25) *
             std::exp(-r * r / (2.0 * (1.0 + s * s)));
    }
    case SignalSpec::Kind::gaussian: {
      const double w2 = kind.width * kind.width;
      return kind.width * quarter_root_pi / std::sqrt(1.0 + w2) *
             std::exp(-(x * x + w2 * xi * xi) / (2.0 * (1.0 + w2)));
    }
    case SignalSpec::Kind::hermite:
      if (kind.index != 0) {
        throw UnsupportedSignal("closed-form magnitude only covers hermite(0)");
      }
      return std::pow(2.0 * kPi, -0.5) * std::exp(-0.25 * (x * x + xi * xi));
    case SignalSpec::Kind::delta: {
      const double w2 = kind.width * kind.width;
      return std::pow(2.0, -0.5) * std::pow(kPi, -0.75) / std::sqrt(1.0 + w2) *
             std::exp(-(x * x + w2 * xi * xi) / (2.0 * (1.0 + w2)));
    }
    case SignalSpec::Kind::file:
      break;
  }
  throw UnsupportedSignal("no closed-form magnitude for this signal kind");
}

}  // namespace phasefront
