#pragma once

#include <string>
#include <utility>
#include <vector>

#include "phasefront/field.hpp"
#include "phasefront/nonlinearity.hpp"
#include "phasefront/qsobolev.hpp"
#include "phasefront/wavefront.hpp"

// Phase-space paradifferential decomposition of a smooth nonlinearity:
//
//   F(u) = F(u_0) + sum_{k<K} [ m_k(x) (phi_{k+1}(x,D) u)
//                             + mt_k(x) conj(phi_{k+1}(x,D) u) ] + F-tail,
//
// where u_k = Phi_k(x,D) u are the cumulative phase-space localizations,
// m_k(x) = int_0^1 dF/dz(u_k + t phi_{k+1} u) dt (mt_k with dF/dzbar), and
// the tail is exactly F(u) - F(u_K). The coefficients assemble into the
// symbol M(x,xi) = sum_k m_k(x) phi_{k+1}(x,xi), which splits into a tame
// part M-sharp (coefficients low-passed at frequency 2^{k delta}) and a
// remainder M-flat whose size reflects the Hoelder roughness of u.
namespace phasefront {

// v_j = F(u_j).
SampledField apply_pointwise(const Nonlinearity& F, const SampledField& u);

struct TelescopeCoeffs {
  int level_count = 0;                  // K
  std::vector<SampledField> m;          // m_k,  k = 0..K-1
  std::vector<SampledField> m_tilde;    // mt_k, k = 0..K-1
  // Phi_k(x,D) u for k = 0..K, built iteratively: cumulative[k+1] =
  // cumulative[k] + pieces[k] in grid arithmetic, so the telescoping
  // identity holds to roundoff at every K.
  std::vector<SampledField> cumulative;
  std::vector<SampledField> pieces;     // phi_{k+1}(x,D) u, k = 0..K-1
};

// Gauss-Legendre with 16 nodes in t (exact for integrands polynomial in t up
// to degree 31, i.e. polynomial F up to degree 32). Missing Wirtinger
// derivatives fall back to central finite differences (step 1e-6) on the
// real coordinate pair. Requires 1 <= K <= min(part levels, grid phase cap);
// throws LevelOutOfBand otherwise.
TelescopeCoeffs telescope_coeffs(const SampledField& u, const Nonlinearity& F,
                                 const PhasePartition& part, int K);

// M(x_j, xi_m) = sum_{k<K} coeffs[k](x_j) phi_{k+1}(x_j, xi_m), K = #coeffs.
GridSymbol assemble_symbol(const std::vector<SampledField>& coeffs,
                           const PhasePartition& part);

// psi0(|D|/cutoff) f: low-pass at the given frequency with the dyadic base
// profile (pass band |xi| <= cutoff, stop band |xi| >= 2 cutoff).
SampledField lowpass_filter(const SampledField& f, double cutoff);

struct CoefficientSplit {
  std::vector<SampledField> sharp;  // psi0(2^{-k delta} D) m_k
  std::vector<SampledField> flat;   // m_k - sharp_k
};

// Per-level smoothing split at cutoff 2^{k delta}; delta in (0,1).
CoefficientSplit split_coefficients(const std::vector<SampledField>& m,
                                    double delta);

// Assembled smoothing split (sharp symbol, flat symbol).
std::pair<GridSymbol, GridSymbol> symbol_split(
    const std::vector<SampledField>& coeffs, const PhasePartition& part,
    double delta);

struct ParadiffDecomposition {
  int level_count = 0;  // K
  double delta = 0.0;
  TelescopeCoeffs coeffs;
  CoefficientSplit coeff_split;
  GridSymbol sharp;         // M-sharp
  GridSymbol flat;          // M-flat
  // symbol[i] == sharp[i] + flat[i] exactly (one rounded addition per node);
  // it agrees with the direct assembly of the unsplit coefficients to
  // roundoff.
  GridSymbol symbol;
  SampledField smooth_part;  // F(Phi_0 u)
};

ParadiffDecomposition build_paradiff(const SampledField& u,
                                     const Nonlinearity& F, int K,
                                     double delta);

struct SeminormFit {
  // sup of the weighted derivative over dyadic annuli 2^n <= 1+|x|+|xi| <
  // 2^{n+1}, indexed from n = 0; empty annuli carry 0.
  std::vector<double> annulus_sups;
  double slope = 0.0;  // least-squares slope of log2 sup vs n (nonzero sups)
};

// Finite-difference probe of the symbol-class bound
//   |d^beta_x d^alpha_xi M| <= C (1 + |x| + |xi|)^{m - rho alpha + delta beta}:
// reports the weighted sups per annulus and their growth slope (bounded
// classes should fit slope ~ 0). Central differences, orders alpha, beta in
// {0, 1, 2}; StencilOverrun otherwise or when the stencil does not fit.
SeminormFit seminorm_probe(const GridSymbol& M, int alpha, int beta, double m,
                           double rho, double delta);

struct CompositionReport {
  double sigma = 0.0;
  double theta = 0.0;
  bool input_regular = false;   // u has no sigma-singular direction near theta
  bool output_regular = false;  // F(u) has none either
  std::vector<double> input_directions;      // sigma-singular dirs of u
  std::vector<double> output_directions;     // sigma-singular dirs of F(u)
  // output directions with no input direction within 1.5 angular bins: the
  // anomalies that appear only under the nonlinearity.
  std::vector<double> anomalous_directions;
};

// Detects the sigma-order singular directions of u and of F(u) (pointwise
// application) with the same detector and compares them at direction theta.
// params.sobolev_orders is overridden with {sigma}.
CompositionReport microlocal_composition_check(const SampledField& u,
                                               const Nonlinearity& F,
                                               double sigma, double theta,
                                               const DetectionParams& params = {});

// Per-level summary (sup norms of m_k, mt_k, and the split parts) plus the
// truncation data, as JSON with fixed key order (byte-stable for equal
// inputs).
void write_paradiff_summary_json(const ParadiffDecomposition& d,
                                 const std::string& path);

}  // namespace phasefront
