#pragma once

#include <string>
#include <vector>

#include "phasefront/field.hpp"

// Gaussian-windowed phase-space transform
//   Tu(x, xi) = 2^{-1/2} pi^{-3/4} int exp(-i y xi) exp(-(x-y)^2/2) u(y) dy
// evaluated by trapezoid quadrature on u's grid, with the window truncated at
// |y - x| <= 8 (tail below 1e-14 of the peak). |Tu|^2 is the phase-space
// energy density this library reads wave front structure from; with the
// prefactor above, T is an L^2(dx dxi) isometry.
namespace phasefront {

// Window truncation radius in units of the Gaussian's standard deviation.
constexpr double kWindowHalfWidth = 8.0;

// Uniform rectangular grid in (x, xi), endpoints included.
struct PhaseGrid {
  double x_min = 0.0, x_max = 0.0;
  int x_count = 0;
  double xi_min = 0.0, xi_max = 0.0;
  int xi_count = 0;

  double x_step() const { return (x_max - x_min) / (x_count - 1); }
  double xi_step() const { return (xi_max - xi_min) / (xi_count - 1); }
  double x(int i) const { return x_min + i * x_step(); }
  double xi(int k) const { return xi_min + k * xi_step(); }
  int node_count() const { return x_count * xi_count; }

  bool operator==(const PhaseGrid& o) const {
    return x_min == o.x_min && x_max == o.x_max && x_count == o.x_count &&
           xi_min == o.xi_min && xi_max == o.xi_max && xi_count == o.xi_count;
  }
};

// Validates: counts >= 16, ranges finite and strictly increasing.
PhaseGrid make_phase_grid(double x_min, double x_max, int x_count,
                          double xi_min, double xi_max, int xi_count);

// Square grid on [-extent, extent]^2 with `count` nodes per axis.
PhaseGrid centered_phase_grid(double extent, int count);

// Complex samples of Tu on a PhaseGrid, row-major with x as the slow index:
// values[i * xi_count + k] = Tu(x_i, xi_k).
struct PhaseMap {
  PhaseGrid grid;
  std::vector<cplx> values;
  std::string provenance;

  const cplx& at(int i, int k) const { return values[i * grid.xi_count + k]; }
  double magnitude(int i, int k) const { return std::abs(at(i, k)); }
};

// Evaluates Tu on the whole grid, one x-row at a time: the window samples are
// fixed per row and each xi column accumulates them against a recurrent unit
// phasor (refreshed exactly every 256 steps). Rows are independent.
//   errors: WindowOverrun if max(|x_min|,|x_max|) + 8 reaches beyond u's
//           domain; NyquistViolation if xi_range leaves u's band.
PhaseMap bargmann_transform(const SampledField& u, const PhaseGrid& pg);

// Single-point evaluation by direct per-term quadrature (independent code
// path: no recurrence, each phase factor from std::polar). Agrees with the
// matching bargmann_transform node to 1e-10.
cplx bargmann_point(const SampledField& u, double x, double xi);

// Analytic |Tu(x, xi)| for the synthetic signal catalog, derived by Gaussian
// integration (all cross-checked against bargmann_point in the tests):
//   constant:    pi^{-1/4} exp(-xi^2/2)
//   chirp(s):    pi^{-1/4} (1+s^2)^{-1/4} exp(-(xi - s x)^2 / (2(1+s^2)))
//   gaussian(w): w pi^{-1/4} (1+w^2)^{-1/2} exp(-(x^2 + w^2 xi^2)/(2(1+w^2)))
//   hermite(0):  2^{-1/2} pi^{-1/2} exp(-(x^2+xi^2)/4)
//   delta(w):    2^{-1/2} pi^{-3/4} (1+w^2)^{-1/2}
//                  * exp(-(x^2 + w^2 xi^2)/(2(1+w^2)))
//                (w -> 0 gives the ideal point mass 2^{-1/2} pi^{-3/4} e^{-x^2/2})
// errors: UnsupportedSignal for hermite index > 0 and for file signals.
double closed_form_magnitude(const SignalSpec& kind, double x, double xi);

}  // namespace phasefront
