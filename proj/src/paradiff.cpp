#include "phasefront/paradiff.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "phasefront/errors.hpp"

namespace phasefront {

namespace {

// 16-node Gauss-Legendre rule on [-1, 1] (symmetric half).
constexpr int kHalfNodes = 8;
constexpr double kGaussNode[kHalfNodes] = {
    0.0950125098376374402, 0.2816035507792589132, 0.4580167776572273863,
    0.6178762444026437484, 0.7554044083550030339, 0.8656312023878317439,
    0.9445750230732325761, 0.9894009349916499326};
constexpr double kGaussWeight[kHalfNodes] = {
    0.1894506104550684963, 0.1826034150449235888, 0.1691565193950025382,
    0.1495959888165767320, 0.1246289712555338720, 0.0951585116824927848,
    0.0622535239386478929, 0.0271524594117540949};

void require_space_field(const SampledField& u, const char* who) {
  if (u.domain != Domain::space)
    throw DimensionMismatch(std::string(who) + ": expected a space-domain field");
  if (static_cast<int>(u.values.size()) != u.grid.sample_count)
    throw DimensionMismatch(std::string(who) + ": value count does not match grid");
}

// Wirtinger derivatives, analytic when supplied, else central differences on
// the real coordinate pair: d/dz = (d/da - i d/db)/2 for u = a + ib.
std::function<cplx(cplx)> wirtinger_dz(const Nonlinearity& F) {
  if (F.dz) return F.dz;
  auto v = F.value;
  return [v](cplx u) {
    const double e = 1e-6;
    const cplx da = (v(u + e) - v(u - e)) / (2.0 * e);
    const cplx db = (v(u + cplx(0.0, e)) - v(u - cplx(0.0, e))) / (2.0 * e);
    return 0.5 * (da - cplx(0.0, 1.0) * db);
  };
}

std::function<cplx(cplx)> wirtinger_dzbar(const Nonlinearity& F) {
  if (F.dzbar) return F.dzbar;
  auto v = F.value;
  return [v](cplx u) {
    const double e = 1e-6;
    const cplx da = (v(u + e) - v(u - e)) / (2.0 * e);
    const cplx db = (v(u + cplx(0.0, e)) - v(u - cplx(0.0, e))) / (2.0 * e);
    return 0.5 * (da + cplx(0.0, 1.0) * db);
  };
}

double sup_abs(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const cplx& z : v) s = std::max(s, std::abs(z));
  return s;
}

// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  if (n < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double d = n * sxx - sx * sx;
  return (n * sxy - sx * sy) / d;
}

}  // namespace

SampledField apply_pointwise(const Nonlinearity& F, const SampledField& u) {
  require_space_field(u, "apply_pointwise");
  SampledField out = u;
  for (auto& z : out.values) z = F.value(z);
  return out;
}

TelescopeCoeffs telescope_coeffs(const SampledField& u, const Nonlinearity& F,
                                 const PhasePartition& part, int K) {
  require_space_field(u, "telescope_coeffs");
  if (K < 1 || K > part.level_count)
    throw LevelOutOfBand("telescope_coeffs: K outside the partition's levels");
  if (K > max_phase_level(u.grid))
    throw LevelOutOfBand("telescope_coeffs: level shells exceed the grid band");

  const int n = u.grid.sample_count;
  auto fz = wirtinger_dz(F);
  auto fzb = wirtinger_dzbar(F);

  // Quadrature nodes mapped to [0, 1].
  double t[2 * kHalfNodes], w[2 * kHalfNodes];
  for (int i = 0; i < kHalfNodes; ++i) {
    t[2 * i] = 0.5 * (1.0 - kGaussNode[i]);
    t[2 * i + 1] = 0.5 * (1.0 + kGaussNode[i]);
    w[2 * i] = w[2 * i + 1] = 0.5 * kGaussWeight[i];
  }

  TelescopeCoeffs out;
  out.level_count = K;
  out.cumulative.reserve(K + 1);
  out.cumulative.push_back(phase_project(u, part, 0));
  for (int k = 0; k < K; ++k) {
    out.pieces.push_back(phase_project(u, part, k + 1));
    SampledField next = out.cumulative.back();
    for (int j = 0; j < n; ++j) next.values[j] += out.pieces.back().values[j];
    out.cumulative.push_back(std::move(next));
  }

  for (int k = 0; k < K; ++k) {
    SampledField mk = u, mtk = u;
    for (int j = 0; j < n; ++j) {
      const cplx a = out.cumulative[k].values[j];
      const cplx b = out.pieces[k].values[j];
      cplx sz(0.0, 0.0), szb(0.0, 0.0);
      for (int i = 0; i < 2 * kHalfNodes; ++i) {
        const cplx arg = a + t[i] * b;
        sz += w[i] * fz(arg);
        szb += w[i] * fzb(arg);
      }
      mk.values[j] = sz;
      mtk.values[j] = szb;
    }
    out.m.push_back(std::move(mk));
    out.m_tilde.push_back(std::move(mtk));
  }
  return out;
}

GridSymbol assemble_symbol(const std::vector<SampledField>& coeffs,
                           const PhasePartition& part) {
  if (coeffs.empty())
    throw DimensionMismatch("assemble_symbol: no coefficient levels");
  const int K = static_cast<int>(coeffs.size());
  if (K > part.level_count)
    throw LevelOutOfBand("assemble_symbol: partition lacks level K");
  const GridSpec1D grid = coeffs[0].grid;
  for (const auto& c : coeffs) {
    require_space_field(c, "assemble_symbol");
    if (!(c.grid == grid))
      throw DimensionMismatch("assemble_symbol: coefficient grids differ");
  }

  const int n = grid.sample_count;
  GridSymbol M;
  M.grid = grid;
  M.origin = "paradiff-symbol";
  M.values.assign(static_cast<size_t>(n) * n, cplx(0.0, 0.0));
  for (int k = 0; k < K; ++k) {
    // phi_{k+1} lives in 2^k <= |z| <= 2^{k+2}; skip nodes outside.
    const double lo = std::ldexp(1.0, k);
    const double hi = std::ldexp(1.0, k + 2);
    for (int j = 0; j < n; ++j) {
      const double x = grid.x(j);
      const cplx c = coeffs[k].values[j];
      cplx* row = M.values.data() + static_cast<size_t>(j) * n;
      for (int m = 0; m < n; ++m) {
        const double r = std::hypot(x, grid.xi(m));
        if (r < lo || r > hi) continue;
        const double lv = part.level(k + 1, x, grid.xi(m));
        if (lv != 0.0) row[m] += c * lv;
      }
    }
  }
  return M;
}

SampledField lowpass_filter(const SampledField& f, double cutoff) {
  require_space_field(f, "lowpass_filter");
  if (!(cutoff > 0.0))
    throw ConfigError("lowpass_filter: cutoff must be positive");
  SampledField fhat = forward_transform(f);
  for (int m = 0; m < fhat.grid.sample_count; ++m)
    fhat.values[m] *= dyadic_base_profile(fhat.grid.xi(m) / cutoff);
  return inverse_transform(fhat);
}

CoefficientSplit split_coefficients(const std::vector<SampledField>& m,
                                    double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw ConfigError("split_coefficients: delta must lie in (0, 1)");
  CoefficientSplit out;
  for (size_t k = 0; k < m.size(); ++k) {
    out.sharp.push_back(lowpass_filter(m[k], std::exp2(delta * k)));
    SampledField flat = m[k];
    for (size_t j = 0; j < flat.values.size(); ++j)
      flat.values[j] -= out.sharp[k].values[j];
    out.flat.push_back(std::move(flat));
  }
  return out;
}

std::pair<GridSymbol, GridSymbol> symbol_split(
    const std::vector<SampledField>& coeffs, const PhasePartition& part,
    double delta) {
  CoefficientSplit s = split_coefficients(coeffs, delta);
  return {assemble_symbol(s.sharp, part), assemble_symbol(s.flat, part)};
}

ParadiffDecomposition build_paradiff(const SampledField& u,
                                     const Nonlinearity& F, int K,
                                     double delta) {
  PhasePartition part = make_phase_partition(K);
  ParadiffDecomposition d;
  d.level_count = K;
  d.delta = delta;
  d.coeffs = telescope_coeffs(u, F, part, K);
  d.coeff_split = split_coefficients(d.coeffs.m, delta);
  d.sharp = assemble_symbol(d.coeff_split.sharp, part);
  d.flat = assemble_symbol(d.coeff_split.flat, part);
  d.symbol.grid = d.sharp.grid;
  d.symbol.origin = "paradiff-symbol";
  d.symbol.values.resize(d.sharp.values.size());
  for (size_t i = 0; i < d.symbol.values.size(); ++i)
    d.symbol.values[i] = d.sharp.values[i] + d.flat.values[i];
  d.smooth_part = apply_pointwise(F, d.coeffs.cumulative[0]);
  return d;
}

SeminormFit seminorm_probe(const GridSymbol& M, int alpha, int beta, double m,
                           double rho, double delta) {
  if (alpha < 0 || alpha > 2 || beta < 0 || beta > 2)
    throw StencilOverrun("seminorm_probe: derivative orders must be in {0,1,2}");
  const int n = M.grid.sample_count;
  const int jr = beta > 0 ? 1 : 0;   // stencil radius in x
  const int mr = alpha > 0 ? 1 : 0;  // stencil radius in xi
  if (n - 2 * jr < 1 || n - 2 * mr < 1)
    throw StencilOverrun("seminorm_probe: stencil does not fit in the grid");

  const double hx = M.grid.spacing();
  const double hxi = M.grid.freq_spacing();
  const double exponent = m - rho * alpha + delta * beta;

  auto dxi = [&](int j, int mm) -> cplx {
    switch (alpha) {
      case 0: return M.at(j, mm);
      case 1: return (M.at(j, mm + 1) - M.at(j, mm - 1)) / (2.0 * hxi);
      default:
        return (M.at(j, mm + 1) - 2.0 * M.at(j, mm) + M.at(j, mm - 1)) /
               (hxi * hxi);
    }
  };
  auto deriv = [&](int j, int mm) -> cplx {
    switch (beta) {
      case 0: return dxi(j, mm);
      case 1: return (dxi(j + 1, mm) - dxi(j - 1, mm)) / (2.0 * hx);
      default:
        return (dxi(j + 1, mm) - 2.0 * dxi(j, mm) + dxi(j - 1, mm)) / (hx * hx);
    }
  };

  SeminormFit fit;
  for (int j = jr; j < n - jr; ++j) {
    const double x = M.grid.x(j);
    for (int mm = mr; mm < n - mr; ++mm) {
      const double wgt = 1.0 + std::abs(x) + std::abs(M.grid.xi(mm));
      const int bin = static_cast<int>(std::floor(std::log2(wgt)));
      if (bin >= static_cast<int>(fit.annulus_sups.size()))
        fit.annulus_sups.resize(bin + 1, 0.0);
      const double v = std::abs(deriv(j, mm)) * std::pow(wgt, -exponent);
      fit.annulus_sups[bin] = std::max(fit.annulus_sups[bin], v);
    }
  }
  std::vector<double> xs, ys;
  for (size_t b = 0; b < fit.annulus_sups.size(); ++b) {
    if (fit.annulus_sups[b] > 0.0) {
      xs.push_back(static_cast<double>(b));
      ys.push_back(std::log2(fit.annulus_sups[b]));
    }
  }
  fit.slope = ls_slope(xs, ys);
  return fit;
}

CompositionReport microlocal_composition_check(const SampledField& u,
                                               const Nonlinearity& F,
                                               double sigma, double theta,
                                               const DetectionParams& params) {
  DetectionParams p = params;
  p.sobolev_orders = {sigma};
  const WavefrontReport ru = detect_wavefront(u, p);
  const WavefrontReport rf = detect_wavefront(apply_pointwise(F, u), p);

  CompositionReport rep;
  rep.sigma = sigma;
  rep.theta = wrap_angle(theta);
  rep.input_directions = ru.sobolev_singular[0];
  rep.output_directions = rf.sobolev_singular[0];

  const double tol = 1.5 * 2.0 * 3.141592653589793238462643383279502884 /
                     p.angular_bins;
  auto near_any = [&](double dir, const std::vector<double>& set) {
    for (double d : set)
      if (circular_distance(dir, d) <= tol) return true;
    return false;
  };
  rep.input_regular = !near_any(rep.theta, rep.input_directions);
  rep.output_regular = !near_any(rep.theta, rep.output_directions);
  for (double d : rep.output_directions)
    if (!near_any(d, rep.input_directions)) rep.anomalous_directions.push_back(d);
  return rep;
}

void write_paradiff_summary_json(const ParadiffDecomposition& d,
                                 const std::string& path) {
  using json = nlohmann::ordered_json;
  json j;
  j["level_count"] = d.level_count;
  j["delta"] = d.delta;
  const GridSpec1D& g = d.symbol.grid;
  j["grid"] = {{"half_width", g.half_width}, {"sample_count", g.sample_count}};
  j["levels"] = json::array();
  for (int k = 0; k < d.level_count; ++k) {
    j["levels"].push_back({{"k", k},
                           {"m_sup", sup_abs(d.coeffs.m[k].values)},
                           {"m_tilde_sup", sup_abs(d.coeffs.m_tilde[k].values)},
                           {"sharp_sup", sup_abs(d.coeff_split.sharp[k].values)},
                           {"flat_sup", sup_abs(d.coeff_split.flat[k].values)}});
  }
  j["smooth_part_l2"] = l2_norm(d.smooth_part);
  std::ofstream out(path);
  if (!out) throw FileFormatError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw FileFormatError("write failed for " + path);
}

}  // namespace phasefront
