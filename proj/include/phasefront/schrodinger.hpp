#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "phasefront/field.hpp"
#include "phasefront/nonlinearity.hpp"

// Time evolution for D_t u + a(x,D) u = F(u) + f(t), D_t = -i d/dt, i.e.
// u_t = -i a(x,D) u + i F(u) + i f(t). The linear semigroup is e^{-i t a}.
//
// Two linear backends for the harmonic oscillator a = (x^2 + xi^2)/2:
//  - a Hermite spectral propagator (expand, rotate eigenphases, resynthesize),
//    used where eigenfunction structure matters;
//  - an exact shear factorization e^{-itH} =
//    e^{-i tan(t/2) x^2/2} . e^{-i sin(t) D^2/2} . e^{-i tan(t/2) x^2/2}
//    realized with two pointwise chirp multiplies around one Fourier
//    multiplier, reduced to |t| <= pi/2 by quarter-period symmetry. This is
//    exact for the discrete band-limited field up to roundoff, and is the
//    default inside the split-step solver.
//
// The nonlinear solver is Strang splitting: half a pointwise ODE step for
// u' = i F(u) + i f(t) - i W(x) u (W collects multiplication-operator parts
// of the Hamiltonian), then a full linear step, then another half.
namespace phasefront {

enum class LinearBackend { fractional_fourier, hermite };

struct EvolutionConfig {
  enum class Hamiltonian { harmonic_oscillator, potential, quadratic };

  Hamiltonian hamiltonian = Hamiltonian::harmonic_oscillator;

  // hamiltonian == potential: a(x,D) = D^2/2 + V(x); V sampled on the grid.
  std::vector<double> potential_values;

  // hamiltonian == quadratic: a(x,xi) = (quad_x2 x^2 + quad_xi2 xi^2)/2
  //   + quad_cross x xi. Cross terms are rejected (UnsupportedHamiltonian).
  double quad_x2 = 1.0;
  double quad_xi2 = 1.0;
  double quad_cross = 0.0;

  Nonlinearity nonlinearity;                       // default: zero
  std::function<cplx(double, double)> forcing;     // f(t, x); optional

  double t_final = 1.0;
  double dt = 1e-2;
  std::vector<double> snapshot_times;              // each within 1e-9 of a step

  LinearBackend backend = LinearBackend::fractional_fourier;
  int hermite_modes = 0;                           // hermite backend; 0 -> N/4
};

struct EvolutionTrace {
  std::vector<double> snapshot_times;
  std::vector<SampledField> snapshots;

  // Per accepted step boundary (step_times[0] == 0 is the initial state).
  std::vector<double> step_times;
  std::vector<double> l2_norms;
  // Quadratic-form energy <u, a(x,D) u> of the linear part at each step
  // boundary; a conserved diagnostic only when the nonlinearity is zero.
  std::vector<double> energies;

  double initial_l2 = 0.0;
  std::vector<std::string> warnings;               // e.g. Hermite truncation
};

// Exact harmonic-oscillator step e^{-itH} u via the shear factorization.
// Valid for any t (reduced modulo quarter periods internally).
SampledField ho_fractional_step(const SampledField& u, double t);

// Hermite spectral propagator for the harmonic oscillator. Expands u0 in
// n_modes Hermite functions (n_modes <= N/4; 0 picks N/4), applies the
// eigenphases e^{-it(n+1/2)}, resynthesizes. The relative L^2 distance of u0
// from its truncated expansion is written to *residual_out when given; a
// residual above 1e-6 is not an error, callers record it as a warning.
SampledField propagate_linear_ho(const SampledField& u0, double t,
                                 int n_modes = 0,
                                 double* residual_out = nullptr);

// Strang split-step evolution of u_t = -i a(x,D) u + i F(u) + i f(t).
// Throws ConfigError for invalid configs (dt <= 0, snapshots off the step
// grid or outside [0, t_final], F(0) != 0), UnsupportedHamiltonian for
// quadratic cross terms, BlowUp when the L^2 norm exceeds 1e3 x initial or
// turns non-finite, and NyquistViolation when more than 1e-6 of the spectral
// mass sits within 5% of the band edge at any step boundary.
EvolutionTrace propagate_strang(const SampledField& u0,
                                const EvolutionConfig& cfg);

// Closed-form harmonic-oscillator evolution of u0 == 1:
//   u(t, x) = c(t) e^{-i tan(t) x^2/2},  |c(t)| = |cos t|^{-1/2},
// with the phase of c(t) fixed to match the spectral propagator (a quarter
// phase turn e^{-i pi/2} per singular time crossed). Throws SingularTime
// within 1e-6 of t = pi/2 + k pi and NyquistViolation when the chirp slope
// tan(t) overruns the grid band.
SampledField chirp_solution(double t, const GridSpec1D& grid);

}  // namespace phasefront
