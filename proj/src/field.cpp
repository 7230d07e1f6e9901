#include "phasefront/field.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <utility>

#include "phasefront/serialize.hpp"

namespace phasefront {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Cached FFTW plans keyed by (size, sign). FFTW_ESTIMATE keeps planning
// deterministic; data is copied through a persistent aligned buffer.
// Single-threaded by design.
struct PlanCache {
  struct Entry {
    fftw_plan plan = nullptr;
    fftw_complex* buf = nullptr;
  };
  std::map<std::pair<int, int>, Entry> entries;

  ~PlanCache() {
    for (auto& [key, e] : entries) {
      fftw_destroy_plan(e.plan);
      fftw_free(e.buf);
    }
  }

  Entry& get(int n, int sign) {
    auto key = std::make_pair(n, sign);
    auto it = entries.find(key);
    if (it == entries.end()) {
      Entry e;
      e.buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
      e.plan = fftw_plan_dft_1d(n, e.buf, e.buf, sign, FFTW_ESTIMATE);
      it = entries.emplace(key, e).first;
    }
    return it->second;
  }
};

void fft_inplace(std::vector<cplx>& v, int sign) {
  static PlanCache cache;
  auto& e = cache.get(static_cast<int>(v.size()), sign);
  // std::complex<double> is layout-compatible with fftw_complex.
  std::memcpy(e.buf, v.data(), sizeof(cplx) * v.size());
  fftw_execute(e.plan);
  std::memcpy(static_cast<void*>(v.data()), e.buf, sizeof(cplx) * v.size());
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

GridSpec1D make_grid(double half_width, int sample_count) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw DimensionMismatch("grid half-width must be positive and finite, got " +
                            std::to_string(half_width));
  }
  if (sample_count < 8 || !is_power_of_two(sample_count)) {
    throw DimensionMismatch("grid sample count must be a power of two >= 8, got " +
                            std::to_string(sample_count));
  }
  return GridSpec1D{half_width, sample_count};
}

SampledField forward_transform(const SampledField& f) {
  if (f.domain != Domain::space) {
    throw DimensionMismatch("forward_transform expects a space-domain field");
  }
  if (static_cast<int>(f.values.size()) != f.grid.sample_count) {
    throw DimensionMismatch("field size does not match its grid");
  }
  const int n = f.grid.sample_count;
  // With x_j = -L + j h and xi_m = -pi/h + m pi/L (N divisible by 4),
  // exp(-i x_j xi_m) = (-1)^(j+m) exp(-2 pi i j m / N), so the transform is a
  // plain FFT with (-1)^j pre- and (-1)^m post-modulation.
  std::vector<cplx> a(n);
  for (int j = 0; j < n; ++j) a[j] = (j & 1) ? -f.values[j] : f.values[j];
  fft_inplace(a, FFTW_FORWARD);
  const double h = f.grid.spacing();
  for (int m = 0; m < n; ++m) a[m] *= (m & 1) ? -h : h;
  return SampledField{f.grid, Domain::frequency, std::move(a)};
}

SampledField inverse_transform(const SampledField& f) {
  if (f.domain != Domain::frequency) {
    throw DimensionMismatch("inverse_transform expects a frequency-domain field");
  }
  if (static_cast<int>(f.values.size()) != f.grid.sample_count) {
    throw DimensionMismatch("field size does not match its grid");
  }
  const int n = f.grid.sample_count;
  std::vector<cplx> a(n);
  for (int m = 0; m < n; ++m) a[m] = (m & 1) ? -f.values[m] : f.values[m];
  fft_inplace(a, FFTW_BACKWARD);
  const double scale = 1.0 / (2.0 * f.grid.half_width);
  for (int j = 0; j < n; ++j) a[j] *= (j & 1) ? -scale : scale;
  return SampledField{f.grid, Domain::space, std::move(a)};
}

double l2_norm(const SampledField& f) {
  double s = 0.0;
  for (const cplx& v : f.values) s += std::norm(v);
  const double measure = (f.domain == Domain::space)
                             ? f.grid.spacing()
                             : 1.0 / (2.0 * f.grid.half_width);
  return std::sqrt(measure * s);
}

double hermite_function(int n, double x) {
  // h_0 = pi^{-1/4} exp(-x^2/2); h_k = x sqrt(2/k) h_{k-1} - sqrt((k-1)/k) h_{k-2}.
  double hm2 = 0.0;
  double hm1 = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
  if (n == 0) return hm1;
  for (int k = 1; k <= n; ++k) {
    double hk = x * std::sqrt(2.0 / k) * hm1 -
                std::sqrt(static_cast<double>(k - 1) / k) * hm2;
    hm2 = hm1;
    hm1 = hk;
  }
  return hm1;
}

double bump_transition(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double b = std::exp(-1.0 / t);
  const double c = std::exp(-1.0 / (1.0 - t));
  return b / (b + c);
}

double smooth_window(double x, double plateau, double cutoff) {
  if (!(plateau > 0.0) || !(cutoff > plateau)) {
    throw DimensionMismatch("smooth_window requires 0 < plateau < cutoff");
  }
  return bump_transition((cutoff - std::abs(x)) / (cutoff - plateau));
}

SampledField apply_window(const SampledField& f, double plateau, double cutoff) {
  if (f.domain != Domain::space) {
    throw DimensionMismatch("apply_window expects a space-domain field");
  }
  SampledField out = f;
  for (int j = 0; j < f.grid.sample_count; ++j) {
    out.values[j] *= smooth_window(f.grid.x(j), plateau, cutoff);
  }
  return out;
}

SignalSpec SignalSpec::constant() { return SignalSpec{}; }
SignalSpec SignalSpec::chirp(double slope) {
  SignalSpec s;
  s.kind = Kind::chirp;
  s.slope = slope;
  return s;
}
SignalSpec SignalSpec::gaussian(double width) {
  SignalSpec s;
  s.kind = Kind::gaussian;
  s.width = width;
  return s;
}
SignalSpec SignalSpec::hermite(int index) {
  SignalSpec s;
  s.kind = Kind::hermite;
  s.index = index;
  return s;
}
SignalSpec SignalSpec::delta(double width) {
  SignalSpec s;
  s.kind = Kind::delta;
  s.width = width;
  return s;
}
SignalSpec SignalSpec::file(std::string path) {
  SignalSpec s;
  s.kind = Kind::file;
  s.path = std::move(path);
  return s;
}

SampledField synthesize(const SignalSpec& spec, const GridSpec1D& grid) {
  make_grid(grid.half_width, grid.sample_count);  // revalidate
  const int n = grid.sample_count;
  SampledField f{grid, Domain::space, std::vector<cplx>(n)};
  switch (spec.kind) {
    case SignalSpec::Kind::constant:
      for (int j = 0; j < n; ++j) f.values[j] = 1.0;
      break;
    case SignalSpec::Kind::chirp: {
      // Instantaneous frequency slope*x must stay inside 80% of the band.
      const double maxfreq = std::abs(spec.slope) * grid.half_width;
      if (maxfreq > 0.8 * grid.nyquist()) {
        throw NyquistViolation("chirp slope " + std::to_string(spec.slope) +
                               " puts instantaneous frequency " + std::to_string(maxfreq) +
                               " beyond 0.8 * " + std::to_string(grid.nyquist()));
      }
      for (int j = 0; j < n; ++j) {
        const double x = grid.x(j);
        f.values[j] = std::polar(1.0, 0.5 * spec.slope * x * x);
      }
      break;
    }
    case SignalSpec::Kind::gaussian: {
      if (!(spec.width > 0.0)) throw UnsupportedSignal("gaussian width must be positive");
      const double inv2s2 = 1.0 / (2.0 * spec.width * spec.width);
      for (int j = 0; j < n; ++j) {
        const double x = grid.x(j);
        f.values[j] = std::exp(-x * x * inv2s2);
      }
      break;
    }
    case SignalSpec::Kind::hermite: {
      if (spec.index < 0 || spec.index > n / 4) {
        throw UnsupportedSignal("hermite index must lie in [0, N/4], got " +
                                std::to_string(spec.index));
      }
      for (int j = 0; j < n; ++j) f.values[j] = hermite_function(spec.index, grid.x(j));
      break;
    }
    case SignalSpec::Kind::delta: {
      if (!(spec.width > 0.0)) throw UnsupportedSignal("delta width must be positive");
      const double amp = 1.0 / (spec.width * std::sqrt(2.0 * kPi));
      const double inv2s2 = 1.0 / (2.0 * spec.width * spec.width);
      for (int j = 0; j < n; ++j) {
        const double x = grid.x(j);
        f.values[j] = amp * std::exp(-x * x * inv2s2);
      }
      break;
    }
    case SignalSpec::Kind::file:
      return read_signal_csv(spec.path, grid);
  }
  return f;
}

}  // namespace phasefront
