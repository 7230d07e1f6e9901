#include "phasefront/qsobolev.hpp"

#include <cmath>
#include <sstream>

namespace phasefront {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

void check_level_index(int k, int level_count, const char* where) {
  if (k < 0 || k > level_count) {
    std::ostringstream msg;
    msg << where << ": level " << k << " outside 0.." << level_count;
    throw LevelOutOfBand(msg.str());
  }
}

// Largest k >= 0 with 2^{k+1} <= cap, or -1 if even level 0 does not fit.
int level_cap(double cap) {
  int k = -1;
  while (std::ldexp(1.0, k + 2) <= cap) ++k;
  return k;
}

}  // namespace

double dyadic_base_profile(double xi) {
  return bump_transition(2.0 - std::abs(xi));
}

double DyadicPartition::level(int k, double xi) const {
  check_level_index(k, level_count, "DyadicPartition::level");
  if (k == 0) return dyadic_base_profile(xi);
  return dyadic_base_profile(std::ldexp(xi, -k)) -
         dyadic_base_profile(std::ldexp(xi, -k + 1));
}

double DyadicPartition::cumulative(double xi) const {
  return dyadic_base_profile(std::ldexp(xi, -level_count));
}

double PhasePartition::level(int k, double x, double xi) const {
  check_level_index(k, level_count, "PhasePartition::level");
  const double r = std::sqrt(x * x + xi * xi);
  if (k == 0) return dyadic_base_profile(r);
  return dyadic_base_profile(std::ldexp(r, -k)) -
         dyadic_base_profile(std::ldexp(r, -k + 1));
}

double PhasePartition::cumulative(double x, double xi) const {
  const double r = std::sqrt(x * x + xi * xi);
  return dyadic_base_profile(std::ldexp(r, -level_count));
}

DyadicPartition make_dyadic_partition(int level_count) {
  if (level_count < 0) throw LevelOutOfBand("make_dyadic_partition: need level_count >= 0");
  return DyadicPartition{level_count};
}

PhasePartition make_phase_partition(int level_count) {
  if (level_count < 0) throw LevelOutOfBand("make_phase_partition: need level_count >= 0");
  return PhasePartition{level_count};
}

int max_dyadic_level(const GridSpec1D& grid) {
  return level_cap(grid.nyquist());
}

int max_phase_level(const GridSpec1D& grid) {
  return level_cap(std::min(grid.half_width, grid.nyquist()));
}

GridSymbol sample_symbol(const GridSpec1D& grid,
                         const std::function<cplx(double, double)>& p,
                         std::string origin) {
  if (!p) throw DimensionMismatch("sample_symbol: evaluator required");
  const int n = grid.sample_count;
  GridSymbol s;
  s.grid = grid;
  s.origin = std::move(origin);
  s.values.resize(static_cast<size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    const double x = grid.x(j);
    for (int m = 0; m < n; ++m) {
      s.values[static_cast<size_t>(j) * n + m] = p(x, grid.xi(m));
    }
  }
  return s;
}

GridSymbol phase_level_symbol(const GridSpec1D& grid, const PhasePartition& part,
                              int k) {
  check_level_index(k, part.level_count, "phase_level_symbol");
  std::ostringstream origin;
  origin << "phase-level-" << k;
  return sample_symbol(
      grid, [&part, k](double x, double xi) { return cplx(part.level(k, x, xi), 0.0); },
      origin.str());
}

PhaseMap symbol_to_phase_map(const GridSymbol& p) {
  const int n = p.grid.sample_count;
  PhaseMap m;
  m.grid = make_phase_grid(p.grid.x(0), p.grid.x(n - 1), n, p.grid.xi(0),
                           p.grid.xi(n - 1), n);
  m.values = p.values;  // same row-major layout
  m.provenance = p.origin;
  return m;
}

SampledField lp_project(const SampledField& f, const DyadicPartition& part, int k) {
  check_level_index(k, part.level_count, "lp_project");
  if (std::ldexp(1.0, k) > f.grid.nyquist()) {
    std::ostringstream msg;
    msg << "lp_project: level " << k << " reaches past the band (2^k > " << f.grid.nyquist()
        << ")";
    throw LevelOutOfBand(msg.str());
  }
  SampledField fh = forward_transform(f);
  for (int m = 0; m < f.grid.sample_count; ++m) {
    fh.values[m] *= part.level(k, f.grid.xi(m));
  }
  return inverse_transform(fh);
}

SampledField kn_quantize(const GridSymbol& p, const SampledField& f) {
  if (!(p.grid == f.grid)) {
    throw DimensionMismatch("kn_quantize: symbol and field grids differ");
  }
  if (f.domain != Domain::space) {
    throw DimensionMismatch("kn_quantize: field must be in the space domain");
  }
  const int n = f.grid.sample_count;
  if (p.values.size() != static_cast<size_t>(n) * n) {
    throw DimensionMismatch("kn_quantize: symbol values do not cover the grid");
  }
  const SampledField fh = forward_transform(f);

  // e^{i x_j xi_m} = (-1)^{j+m} e^{2 pi i j m / N} on the centered grids
  // (N divisible by 4), so one twiddle table serves every row.
  std::vector<cplx> tw(n);
  for (int r = 0; r < n; ++r) tw[r] = std::polar(1.0, kTwoPi * r / n);

  SampledField out{f.grid, Domain::space, std::vector<cplx>(n)};
  const double scale = 1.0 / (2.0 * f.grid.half_width);
  for (int j = 0; j < n; ++j) {
    const cplx* row = p.values.data() + static_cast<size_t>(j) * n;
    cplx acc{0.0, 0.0};
    int idx = 0;  // (j * m) mod N, maintained incrementally
    for (int m = 0; m < n; ++m) {
      const cplx term = row[m] * fh.values[m] * tw[idx];
      acc += (m & 1) ? -term : term;
      idx += j;
      if (idx >= n) idx -= n;
    }
    out.values[j] = scale * ((j & 1) ? -acc : acc);
  }
  return out;
}

SampledField phase_project(const SampledField& f, const PhasePartition& part, int k) {
  return kn_quantize(phase_level_symbol(f.grid, part, k), f);
}

std::vector<double> phase_level_masses(const SampledField& f, const PhasePartition& part) {
  std::vector<double> masses(part.level_count + 1);
  for (int k = 0; k <= part.level_count; ++k) {
    const double nrm = l2_norm(phase_project(f, part, k));
    masses[k] = nrm * nrm;
  }
  return masses;
}

double hs_norm(const SampledField& f, double s) {
  SampledField fh = f.domain == Domain::frequency ? f : forward_transform(f);
  for (int m = 0; m < f.grid.sample_count; ++m) {
    const double xi = f.grid.xi(m);
    fh.values[m] *= std::pow(1.0 + xi * xi, 0.5 * s);
  }
  return l2_norm(fh);
}

double xs_norm(const SampledField& f, double s) {
  if (f.domain != Domain::space) {
    throw DimensionMismatch("xs_norm: field must be in the space domain");
  }
  SampledField w = f;
  for (int j = 0; j < f.grid.sample_count; ++j) {
    const double x = f.grid.x(j);
    w.values[j] *= std::pow(1.0 + x * x, 0.5 * s);
  }
  return l2_norm(w);
}

double qs_norm(const SampledField& f, double s) {
  if (std::abs(s) > 10.0) {
    std::ostringstream msg;
    msg << "qs_norm: order " << s << " outside [-10, 10]";
    throw DimensionMismatch(msg.str());
  }
  if (f.domain != Domain::space) {
    throw DimensionMismatch("qs_norm: field must be in the space domain");
  }
  if (s == 0.0) return l2_norm(f);  // both branches degenerate to L^2
  return std::max(hs_norm(f, s), xs_norm(f, s));
}

double zygmund_norm(const SampledField& f, double r, const DyadicPartition& part) {
  if (!(r > 0.0)) throw DimensionMismatch("zygmund_norm: need r > 0");
  if (f.domain != Domain::space) {
    throw DimensionMismatch("zygmund_norm: field must be in the space domain");
  }
  const int top = std::min(part.level_count, max_dyadic_level(f.grid));
  double best = 0.0;
  for (int k = 0; k <= top; ++k) {
    const SampledField pk = lp_project(f, part, k);
    double sup = 0.0;
    for (const cplx& v : pk.values) sup = std::max(sup, std::abs(v));
    best = std::max(best, std::pow(2.0, r * k) * sup);
  }
  return best;
}

double lp_sum_ratio(const SampledField& f, double s, const PhasePartition& part) {
  const int cap = max_phase_level(f.grid);
  if (part.level_count > cap) {
    std::ostringstream msg;
    msg << "lp_sum_ratio: partition level " << part.level_count
        << " exceeds the grid's representable phase level " << cap;
    throw LevelOutOfBand(msg.str());
  }
  const std::vector<double> masses = phase_level_masses(f, part);
  double num = 0.0;
  for (int k = 0; k <= part.level_count; ++k) {
    num += std::pow(2.0, 2.0 * k * s) * masses[k];
  }
  const double den = qs_norm(f, s);
  return num / (den * den);
}

}  // namespace phasefront
