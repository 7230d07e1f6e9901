#include "phasefront/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "phasefront/errors.hpp"

namespace phasefront {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require_space_field(const SampledField& u, const char* who) {
  if (u.domain != Domain::space)
    throw DimensionMismatch(std::string(who) + ": expected a space-domain field");
  if (static_cast<int>(u.values.size()) != u.grid.sample_count)
    throw DimensionMismatch(std::string(who) + ": value count does not match grid");
}

// i^k with k reduced mod 4 (works for negative k).
cplx quarter_phase(long long k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void chirp_multiply(SampledField& u, double slope) {
  const int n = u.grid.sample_count;
  for (int j = 0; j < n; ++j) {
    const double x = u.grid.x(j);
    u.values[j] *= std::polar(1.0, -0.5 * slope * x * x);
  }
}

void dispersion_multiply(SampledField& uhat, double coeff) {
  const int n = uhat.grid.sample_count;
  for (int m = 0; m < n; ++m) {
    const double xi = uhat.grid.xi(m);
    uhat.values[m] *= std::polar(1.0, -0.5 * coeff * xi * xi);
  }
}

// Fraction of spectral mass within 5% of the band edge.
double band_edge_fraction(const SampledField& uhat) {
  const double edge = 0.95 * uhat.grid.nyquist();
  double total = 0.0, near = 0.0;
  for (int m = 0; m < uhat.grid.sample_count; ++m) {
    const double w = std::norm(uhat.values[m]);
    total += w;
    if (std::abs(uhat.grid.xi(m)) >= edge) near += w;
  }
  return total > 0.0 ? near / total : 0.0;
}

}  // namespace

SampledField ho_fractional_step(const SampledField& u, double t) {
  require_space_field(u, "ho_fractional_step");
  const int n = u.grid.sample_count;

  // Reduce t by half periods: e^{-i pi H} is parity times e^{-i pi/2}, so
  // u(t) = (-i)^k P^k e^{-i t0 H} u with t0 = t - k pi in [-pi/2, pi/2).
  const long long k = static_cast<long long>(std::floor(t / kPi + 0.5));
  const double t0 = t - static_cast<double>(k) * kPi;

  SampledField v = u;
  if (k % 2 != 0) {
    for (int j = 0; j < n; ++j) v.values[j] = u.values[(n - j) % n];
  }

  if (t0 != 0.0) {
    const double shear = std::tan(0.5 * t0);  // |shear| <= 1 after reduction
    chirp_multiply(v, shear);
    SampledField vhat = forward_transform(v);
    dispersion_multiply(vhat, std::sin(t0));
    v = inverse_transform(vhat);
    chirp_multiply(v, shear);
  }

  const cplx phase = quarter_phase(-k);
  for (auto& z : v.values) z *= phase;
  return v;
}

SampledField propagate_linear_ho(const SampledField& u0, double t, int n_modes,
                                 double* residual_out) {
  require_space_field(u0, "propagate_linear_ho");
  const int n = u0.grid.sample_count;
  if (n_modes == 0) n_modes = n / 4;
  if (n_modes < 1 || n_modes > n / 4)
    throw UnsupportedSignal("propagate_linear_ho: n_modes must be in [1, N/4]");

  const double h = u0.grid.spacing();
  const double quarter_pi = std::pow(kPi, -0.25);

  // Streaming normalized recurrence, one column of Hermite values at a time:
  // h_0 = pi^{-1/4} e^{-x^2/2}, h_1 = sqrt(2) x h_0,
  // h_k = x sqrt(2/k) h_{k-1} - sqrt((k-1)/k) h_{k-2}.
  // Coefficients c_n = h * sum_j u_j h_n(x_j) (trapezoid == rectangle on the
  // periodic grid; the h_n are real).
  std::vector<cplx> coeff(n_modes, cplx(0.0, 0.0));
  for (int j = 0; j < n; ++j) {
    const double x = u0.grid.x(j);
    const cplx uj = u0.values[j];
    double hm2 = quarter_pi * std::exp(-0.5 * x * x);
    double hm1 = std::sqrt(2.0) * x * hm2;
    coeff[0] += uj * hm2;
    if (n_modes > 1) coeff[1] += uj * hm1;
    for (int m = 2; m < n_modes; ++m) {
      const double hm = x * std::sqrt(2.0 / m) * hm1 -
                        std::sqrt((m - 1.0) / m) * hm2;
      coeff[m] += uj * hm;
      hm2 = hm1;
      hm1 = hm;
    }
  }
  for (auto& c : coeff) c *= h;

  std::vector<cplx> rotated(n_modes);
  for (int m = 0; m < n_modes; ++m)
    rotated[m] = coeff[m] * std::polar(1.0, -t * (m + 0.5));

  // Second pass: resynthesize the evolved sum and, alongside it, the plain
  // projection so the truncation residual can be reported.
  SampledField out;
  out.grid = u0.grid;
  out.domain = Domain::space;
  out.values.assign(n, cplx(0.0, 0.0));
  double err2 = 0.0, norm2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double x = u0.grid.x(j);
    double hm2 = quarter_pi * std::exp(-0.5 * x * x);
    double hm1 = std::sqrt(2.0) * x * hm2;
    cplx evolved = rotated[0] * hm2;
    cplx projected = coeff[0] * hm2;
    if (n_modes > 1) {
      evolved += rotated[1] * hm1;
      projected += coeff[1] * hm1;
    }
    for (int m = 2; m < n_modes; ++m) {
      const double hm = x * std::sqrt(2.0 / m) * hm1 -
                        std::sqrt((m - 1.0) / m) * hm2;
      evolved += rotated[m] * hm;
      projected += coeff[m] * hm;
      hm2 = hm1;
      hm1 = hm;
    }
    out.values[j] = evolved;
    err2 += std::norm(u0.values[j] - projected);
    norm2 += std::norm(u0.values[j]);
  }
  if (residual_out)
    *residual_out = norm2 > 0.0 ? std::sqrt(err2 / norm2) : 0.0;
  return out;
}

SampledField chirp_solution(double t, const GridSpec1D& grid) {
  // Singular at t = pi/2 + k pi, where the field degenerates to a delta.
  if (std::abs(std::remainder(t - 0.5 * kPi, kPi)) < 1e-6)
    throw SingularTime("chirp_solution: t within 1e-6 of pi/2 + k pi");

  const double slope = std::tan(t);
  const double band = 0.8 * grid.nyquist();
  if (std::abs(slope) * grid.half_width > band)
    throw NyquistViolation("chirp_solution: chirp slope overruns the band");

  // c(t) = |cos t|^{-1/2} e^{-i (pi/2) k}, k = number of singular times
  // crossed; matches the Hermite eigenphase expansion of u0 == 1.
  const long long k = static_cast<long long>(std::floor(t / kPi + 0.5));
  const cplx c = quarter_phase(-k) / std::sqrt(std::abs(std::cos(t)));

  SampledField out;
  out.grid = grid;
  out.domain = Domain::space;
  out.values.resize(grid.sample_count);
  for (int j = 0; j < grid.sample_count; ++j) {
    const double x = grid.x(j);
    out.values[j] = c * std::polar(1.0, -0.5 * slope * x * x);
  }
  return out;
}

namespace {

// One RK4 step of the pointwise ODE u' = i F(u) + i f(t, x) - i W(x) u,
// taken in place over [t, t + eta].
struct LocalStepper {
  const std::vector<double>* weight = nullptr;          // W(x_j); may be null
  const Nonlinearity* nl = nullptr;
  const std::function<cplx(double, double)>* forcing = nullptr;
  const GridSpec1D* grid = nullptr;
  std::vector<cplx> k1, k2, k3, k4, tmp;

  void derivative(double t, const std::vector<cplx>& v, std::vector<cplx>& out) {
    const int n = static_cast<int>(v.size());
    out.resize(n);
    const cplx iu(0.0, 1.0);
    for (int j = 0; j < n; ++j) {
      cplx rhs = nl->value(v[j]);
      if (forcing && *forcing) rhs += (*forcing)(t, grid->x(j));
      if (weight) rhs -= (*weight)[j] * v[j];
      out[j] = iu * rhs;
    }
  }

  void step(double t, double eta, std::vector<cplx>& u) {
    const int n = static_cast<int>(u.size());
    derivative(t, u, k1);
    tmp.resize(n);
    for (int j = 0; j < n; ++j) tmp[j] = u[j] + 0.5 * eta * k1[j];
    derivative(t + 0.5 * eta, tmp, k2);
    for (int j = 0; j < n; ++j) tmp[j] = u[j] + 0.5 * eta * k2[j];
    derivative(t + 0.5 * eta, tmp, k3);
    for (int j = 0; j < n; ++j) tmp[j] = u[j] + eta * k3[j];
    derivative(t + eta, tmp, k4);
    const double w = eta / 6.0;
    for (int j = 0; j < n; ++j)
      u[j] += w * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
};

}  // namespace

EvolutionTrace propagate_strang(const SampledField& u0,
                                const EvolutionConfig& cfg) {
  require_space_field(u0, "propagate_strang");
  const int n = u0.grid.sample_count;

  if (!(cfg.dt > 0.0)) throw ConfigError("propagate_strang: dt must be positive");
  if (!(cfg.t_final > 0.0))
    throw ConfigError("propagate_strang: t_final must be positive");
  if (!cfg.nonlinearity.value)
    throw ConfigError("propagate_strang: nonlinearity has no value function");
  if (std::abs(cfg.nonlinearity.value(cplx(0.0, 0.0))) >= 1e-14)
    throw ConfigError("propagate_strang: nonlinearity must vanish at 0");

  using Ham = EvolutionConfig::Hamiltonian;
  if (cfg.hamiltonian == Ham::potential &&
      static_cast<int>(cfg.potential_values.size()) != n)
    throw DimensionMismatch("propagate_strang: potential sample count != N");
  if (cfg.hamiltonian == Ham::quadratic && cfg.quad_cross != 0.0)
    throw UnsupportedHamiltonian(
        "propagate_strang: x*xi cross terms are not supported");
  if (cfg.backend == LinearBackend::hermite &&
      cfg.hamiltonian != Ham::harmonic_oscillator)
    throw ConfigError(
        "propagate_strang: the hermite backend requires the harmonic oscillator");
  int n_modes = cfg.hermite_modes == 0 ? n / 4 : cfg.hermite_modes;
  if (cfg.backend == LinearBackend::hermite && (n_modes < 1 || n_modes > n / 4))
    throw UnsupportedSignal("propagate_strang: hermite_modes must be in [1, N/4]");

  const long long steps = std::max<long long>(
      1, static_cast<long long>(std::ceil(cfg.t_final / cfg.dt - 1e-12)));
  const double dt = cfg.t_final / static_cast<double>(steps);

  // Snapshots must sit on step boundaries (sorted, inside [0, t_final]).
  std::vector<long long> snap_step(cfg.snapshot_times.size());
  for (size_t i = 0; i < cfg.snapshot_times.size(); ++i) {
    const double s = cfg.snapshot_times[i];
    if (i > 0 && s < cfg.snapshot_times[i - 1])
      throw ConfigError("propagate_strang: snapshot times must be sorted");
    if (s < -1e-9 || s > cfg.t_final + 1e-9)
      throw ConfigError("propagate_strang: snapshot time outside [0, t_final]");
    const long long k = std::llround(s / dt);
    if (std::abs(static_cast<double>(k) * dt - s) > 1e-9)
      throw ConfigError("propagate_strang: snapshot time is not a step boundary");
    snap_step[i] = k;
  }

  // Multiplication-operator part of the Hamiltonian, handled in the local
  // ODE sub-step; and the quadratic-form weights used for the energy record.
  std::vector<double> local_weight(n, 0.0);
  std::vector<double> energy_weight(n, 0.0);
  double kinetic_coeff = 0.5;
  switch (cfg.hamiltonian) {
    case Ham::harmonic_oscillator:
      for (int j = 0; j < n; ++j) {
        const double x = u0.grid.x(j);
        energy_weight[j] = 0.5 * x * x;   // nonlocal step carries x^2/2 + D^2/2
      }
      break;
    case Ham::potential:
      for (int j = 0; j < n; ++j) {
        local_weight[j] = cfg.potential_values[j];
        energy_weight[j] = cfg.potential_values[j];
      }
      break;
    case Ham::quadratic:
      kinetic_coeff = 0.5 * cfg.quad_xi2;
      for (int j = 0; j < n; ++j) {
        const double x = u0.grid.x(j);
        local_weight[j] = 0.5 * cfg.quad_x2 * x * x;
        energy_weight[j] = local_weight[j];
      }
      break;
  }
  const bool ho_nonlocal = cfg.hamiltonian == Ham::harmonic_oscillator;
  const double dispersion_coeff =
      cfg.hamiltonian == Ham::quadratic ? cfg.quad_xi2 : 1.0;

  LocalStepper local;
  local.weight = &local_weight;
  local.nl = &cfg.nonlinearity;
  local.forcing = cfg.forcing ? &cfg.forcing : nullptr;
  local.grid = &u0.grid;

  EvolutionTrace trace;
  trace.initial_l2 = l2_norm(u0);
  const double blowup_cap = 1e3 * std::max(trace.initial_l2, 1e-300);

  SampledField u = u0;
  bool truncation_reported = false;

  auto record_boundary = [&](long long k) {
    const double t = static_cast<double>(k) * dt;
    SampledField uhat = forward_transform(u);
    if (band_edge_fraction(uhat) > 1e-6)
      throw NyquistViolation(
          "propagate_strang: spectral mass within 5% of the band edge");
    const double l2 = l2_norm(u);
    if (!std::isfinite(l2) || l2 > blowup_cap)
      throw BlowUp("propagate_strang: L^2 norm exceeded 1e3 x initial");
    double kinetic = 0.0;
    for (int m = 0; m < n; ++m) {
      const double xi = uhat.grid.xi(m);
      kinetic += xi * xi * std::norm(uhat.values[m]);
    }
    kinetic *= kinetic_coeff * uhat.grid.freq_spacing() / (2.0 * kPi);
    double potential = 0.0;
    for (int j = 0; j < n; ++j)
      potential += energy_weight[j] * std::norm(u.values[j]);
    potential *= u.grid.spacing();
    trace.step_times.push_back(t);
    trace.l2_norms.push_back(l2);
    trace.energies.push_back(kinetic + potential);
    for (size_t i = 0; i < snap_step.size(); ++i) {
      if (snap_step[i] == k) {
        trace.snapshot_times.push_back(cfg.snapshot_times[i]);
        trace.snapshots.push_back(u);
      }
    }
  };

  record_boundary(0);
  for (long long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    local.step(t, 0.5 * dt, u.values);
    if (ho_nonlocal) {
      if (cfg.backend == LinearBackend::hermite) {
        double residual = 0.0;
        u = propagate_linear_ho(u, dt, n_modes, &residual);
        if (residual > 1e-6 && !truncation_reported) {
          trace.warnings.push_back(
              "hermite truncation residual " + std::to_string(residual) +
              " above 1e-6 at step " + std::to_string(k));
          truncation_reported = true;
        }
      } else {
        u = ho_fractional_step(u, dt);
      }
    } else {
      SampledField uhat = forward_transform(u);
      dispersion_multiply(uhat, dispersion_coeff * dt);
      u = inverse_transform(uhat);
    }
    local.step(t + 0.5 * dt, 0.5 * dt, u.values);
    record_boundary(k + 1);
  }

  return trace;
}

}  // namespace phasefront
