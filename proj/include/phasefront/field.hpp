#pragma once

#include <complex>
#include <string>
#include <vector>

#include "phasefront/errors.hpp"

// Sampled fields on uniform real-line grids and the discrete Fourier
// conventions every other module builds on.
//
// Grid: x_j = -L + j*h, j = 0..N-1, h = 2L/N, N a power of two.
// Dual grid (centered): xi_m = -pi/h + m*(pi/L), m = 0..N-1.
// Forward transform: fhat(xi_m) = h * sum_j exp(-i x_j xi_m) f(x_j).
// Inverse:           f(x_j) = (1/2pi) * (pi/L) * sum_m exp(i x_j xi_m) fhat(xi_m).
// These are exact inverses of each other in grid arithmetic, and
// h*sum|f|^2 == (1/2pi)*(pi/L)*sum|fhat|^2 (discrete Parseval).
namespace phasefront {

using cplx = std::complex<double>;

struct GridSpec1D {
  double half_width = 0.0;  // L
  int sample_count = 0;     // N, power of two, >= 8

  double spacing() const { return 2.0 * half_width / sample_count; }
  double x(int j) const { return -half_width + j * spacing(); }
  double nyquist() const { return 3.141592653589793238462643383279502884 / spacing(); }
  double freq_spacing() const { return 3.141592653589793238462643383279502884 / half_width; }
  double xi(int m) const { return -nyquist() + m * freq_spacing(); }

  bool operator==(const GridSpec1D& o) const {
    return half_width == o.half_width && sample_count == o.sample_count;
  }
};

// Validates L > 0 and N a power of two >= 8.
GridSpec1D make_grid(double half_width, int sample_count);

enum class Domain { space, frequency };

struct SampledField {
  GridSpec1D grid;
  Domain domain = Domain::space;
  std::vector<cplx> values;
};

struct SignalSpec {
  enum class Kind { constant, chirp, gaussian, hermite, delta, file };
  Kind kind = Kind::constant;
  double slope = 0.0;   // chirp: exp(i*slope*x^2/2)
  double width = 1.0;   // gaussian: exp(-x^2/(2 width^2)); delta: unit-mass gaussian of this width
  int index = 0;        // hermite: L^2-normalized eigenfunction index
  std::string path;     // file: signal CSV

  static SignalSpec constant();
  static SignalSpec chirp(double slope);
  static SignalSpec gaussian(double width);
  static SignalSpec hermite(int index);
  static SignalSpec delta(double width);
  static SignalSpec file(std::string path);
};

// Builds the named signal on the grid.
//   chirp: requires |slope|*L <= 0.8 * pi/h (instantaneous frequency inside
//          80% of the band), else NyquistViolation.
//   hermite: requires 0 <= index <= N/4, else UnsupportedSignal.
//   file: the CSV header must name the same L and N, else FileFormatError.
SampledField synthesize(const SignalSpec& spec, const GridSpec1D& grid);

// Space -> frequency (centered layout, spacing pi/L). Throws DimensionMismatch
// if the field is already in the frequency domain.
SampledField forward_transform(const SampledField& f);

// Frequency -> space. Exact inverse of forward_transform in grid arithmetic.
SampledField inverse_transform(const SampledField& f);

// h * sum |f|^2 over space samples, or the Parseval-equivalent sum in frequency.
double l2_norm(const SampledField& f);

// L^2-normalized Hermite function h_n(x) (eigenfunction of (-d^2/dx^2 + x^2)/2
// with eigenvalue n + 1/2), evaluated by the stable normalized recurrence.
double hermite_function(int n, double x);

// C^inf transition: 0 for t <= 0, 1 for t >= 1, B(t)/(B(t)+B(1-t)) between,
// with B(t) = exp(-1/t). Monotone; equals 1/2 at t = 1/2.
double bump_transition(double t);

// Smooth window: 1 on |x| <= plateau, 0 on |x| >= cutoff, C^inf ramp between.
double smooth_window(double x, double plateau, double cutoff);

// Multiplies f pointwise by smooth_window.
SampledField apply_window(const SampledField& f, double plateau, double cutoff);

}  // namespace phasefront
