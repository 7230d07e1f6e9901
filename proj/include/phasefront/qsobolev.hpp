#pragma once

#include <functional>
#include <string>
#include <vector>

#include "phasefront/bargmann.hpp"
#include "phasefront/field.hpp"

// Littlewood-Paley partitions in frequency and in phase space, Kohn-Nirenberg
// quantization of grid symbols, and the Q^s / Zygmund norms built from them.
//
// The dyadic profile is pinned exactly so results are reproducible across
// implementations: psi0(xi) = bump_transition(2 - |xi|), which is 1 for
// |xi| <= 1, 0 for |xi| >= 2, and C^inf in between. Level k >= 1 is the
// difference psi_k(xi) = psi0(2^{-k} xi) - psi0(2^{-k+1} xi), supported in
// 2^{k-1} <= |xi| <= 2^{k+1}; level 0 is psi0 itself. Partial sums telescope
// to Psi_K(xi) = psi0(2^{-K} xi) exactly in IEEE double arithmetic: scaling
// by powers of two is exact, at each point at most one cumulative level is
// strictly between 0 and 1, and v + fl(1 - v) rounds to 1 under
// round-to-nearest-even.
//
// The phase-space partition applies the same profile radially in
// |z| = |(x, xi)|, which also makes every level even in xi.
namespace phasefront {

// psi0 above.
double dyadic_base_profile(double xi);

struct DyadicPartition {
  int level_count = 0;  // K: levels 0..K are available

  double level(int k, double xi) const;  // psi_k(xi)
  double cumulative(double xi) const;    // Psi_K(xi)
};

struct PhasePartition {
  int level_count = 0;

  double level(int k, double x, double xi) const;  // phi_k(x, xi)
  double cumulative(double x, double xi) const;    // Phi_K(x, xi)
};

DyadicPartition make_dyadic_partition(int level_count);
PhasePartition make_phase_partition(int level_count);

// Highest level whose full shell (reaching 2^{k+1} in |xi|, resp. in |z|) is
// representable on the grid: 2^{k+1} <= pi/h, resp. 2^{k+1} <= min(L, pi/h).
int max_dyadic_level(const GridSpec1D& grid);
int max_phase_level(const GridSpec1D& grid);

// A symbol p(x, xi) sampled on the grid and its dual: values[j * N + m] is
// p at space node j, frequency node m.
struct GridSymbol {
  GridSpec1D grid;
  std::vector<cplx> values;
  std::string origin;

  cplx at(int j, int m) const {
    return values[static_cast<size_t>(j) * grid.sample_count + m];
  }
};

GridSymbol sample_symbol(const GridSpec1D& grid,
                         const std::function<cplx(double, double)>& p,
                         std::string origin);
GridSymbol phase_level_symbol(const GridSpec1D& grid, const PhasePartition& part,
                              int k);

// View a grid symbol as a phase-space map (space nodes x dual nodes), which
// shares the CSV/binary serialization of transforms. Needs N >= 16.
PhaseMap symbol_to_phase_map(const GridSymbol& p);

// psi_k(D) f: transform, multiply by the level profile, transform back.
// Throws LevelOutOfBand when k is outside 0..K or 2^k exceeds the band.
SampledField lp_project(const SampledField& f, const DyadicPartition& part, int k);

// Kohn-Nirenberg quantization: out(x_j) = (1/2L) sum_m e^{i x_j xi_m}
// p(x_j, xi_m) fhat(xi_m). O(N^2); exact identity when p == 1.
SampledField kn_quantize(const GridSymbol& p, const SampledField& f);

// phi_k(x, D) f via kn_quantize of the sampled level symbol.
SampledField phase_project(const SampledField& f, const PhasePartition& part, int k);

// ||phi_k(x, D) f||_{L^2}^2 for k = 0..K.
std::vector<double> phase_level_masses(const SampledField& f, const PhasePartition& part);

// ||<D>^s f||_{L^2} and ||<x>^s f||_{L^2} with <t> = sqrt(1 + t^2).
double hs_norm(const SampledField& f, double s);
double xs_norm(const SampledField& f, double s);

// Q^s norm: max of the two branch norms, so Q^0 coincides with L^2 exactly.
// Requires |s| <= 10.
double qs_norm(const SampledField& f, double s);

// sup_j 2^{rj} ||psi_j(D) f||_{L^inf} over the levels representable on the
// grid (at most part.level_count). Requires r > 0.
double zygmund_norm(const SampledField& f, double r, const DyadicPartition& part);

// (sum_j 2^{2js} ||phi_j(x,D) f||^2) / qs_norm(f, s)^2: the square-function
// ratio whose boundedness the phase-space theory asserts. Throws
// LevelOutOfBand if the partition has levels the grid cannot represent.
double lp_sum_ratio(const SampledField& f, double s, const PhasePartition& part);

}  // namespace phasefront
