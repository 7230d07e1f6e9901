#include "phasefront/hamflow.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>
#include <sstream>

#include "phasefront/wavefront.hpp"

namespace phasefront {

Eigen::MatrixXd symplectic_form(int dimension) {
  if (dimension < 1) throw DimensionMismatch("symplectic_form: dimension must be >= 1");
  const int d = dimension;
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  omega.topRightCorner(d, d) = Eigen::MatrixXd::Identity(d, d);
  omega.bottomLeftCorner(d, d) = -Eigen::MatrixXd::Identity(d, d);
  return omega;
}

QuadraticHamiltonian make_quadratic(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols() || A.rows() < 2 || A.rows() % 2 != 0) {
    std::ostringstream msg;
    msg << "make_quadratic: A must be square 2d x 2d, got " << A.rows() << " x " << A.cols();
    throw DimensionMismatch(msg.str());
  }
  const double scale = std::max(A.cwiseAbs().maxCoeff(), 1.0);
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    std::ostringstream msg;
    msg << "make_quadratic: A not symmetric, max |A - A^T| = " << asym;
    throw DimensionMismatch(msg.str());
  }
  QuadraticHamiltonian q;
  q.dimension = static_cast<int>(A.rows()) / 2;
  q.A = 0.5 * (A + A.transpose());  // exact symmetry for downstream algebra
  return q;
}

QuadraticHamiltonian harmonic_oscillator(int dimension) {
  if (dimension < 1) throw DimensionMismatch("harmonic_oscillator: dimension must be >= 1");
  QuadraticHamiltonian q;
  q.dimension = dimension;
  q.A = Eigen::MatrixXd::Identity(2 * dimension, 2 * dimension);
  return q;
}

HamiltonianField make_field(
    int dimension, std::function<double(double, const Eigen::VectorXd&)> value,
    std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> gradient,
    double t_begin, double t_end) {
  if (dimension < 1) throw DimensionMismatch("make_field: dimension must be >= 1");
  if (!value) throw DimensionMismatch("make_field: value callback required");
  if (!(t_end > t_begin)) throw DimensionMismatch("make_field: need t_end > t_begin");

  // Spot-check degree-2 homogeneity on a deterministic sample. A symbol that
  // fails this is outside the class the propagation theory covers.
  std::mt19937 rng(0x9e3779b9u);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const double t = t_begin + (t_end - t_begin) * 0.5 * (unit(rng) + 1.0);
    Eigen::VectorXd z(2 * dimension);
    for (int i = 0; i < z.size(); ++i) z(i) = 2.0 * unit(rng);
    if (z.norm() < 0.5) z(0) += 1.0;  // keep the sample away from the origin
    const double base = value(t, z);
    for (double lambda : {2.0, 3.0}) {
      const double scaled = value(t, lambda * z);
      const double expect = lambda * lambda * base;
      if (std::abs(scaled - expect) > 1e-8 * std::max(1.0, std::abs(expect))) {
        std::ostringstream msg;
        msg << "make_field: symbol not homogeneous of degree 2: a(" << lambda
            << " z) = " << scaled << " vs " << expect << " at t = " << t;
        throw NotHomogeneous(msg.str());
      }
    }
  }

  HamiltonianField h;
  h.dimension = dimension;
  h.value = std::move(value);
  h.gradient = std::move(gradient);
  h.t_begin = t_begin;
  h.t_end = t_end;
  return h;
}

namespace {

void check_start(const Eigen::VectorXd& z0, int dimension, const char* where) {
  if (z0.size() != 2 * dimension) {
    std::ostringstream msg;
    msg << where << ": z0 has size " << z0.size() << ", expected " << 2 * dimension;
    throw DimensionMismatch(msg.str());
  }
  if (z0.norm() == 0.0) {
    throw ZeroPoint(std::string(where) + ": flow undefined at the origin");
  }
}

}  // namespace

FlowResult flow_quadratic(const QuadraticHamiltonian& q, double t,
                          const Eigen::VectorXd& z0) {
  check_start(z0, q.dimension, "flow_quadratic");
  const Eigen::MatrixXd gen = t * (symplectic_form(q.dimension) * q.A);
  FlowResult r;
  r.jacobian = gen.exp();
  r.endpoint = r.jacobian * z0;
  return r;
}

FlowResult flow_numeric(const HamiltonianField& h, double t0, double t1,
                        const Eigen::VectorXd& z0, double dt) {
  check_start(z0, h.dimension, "flow_numeric");
  const double span = t1 - t0;
  if (!(dt > 0.0) || dt > std::abs(span) / 16.0) {
    std::ostringstream msg;
    msg << "flow_numeric: need 0 < dt <= |t1 - t0| / 16, got dt = " << dt
        << " over span " << span;
    throw DimensionMismatch(msg.str());
  }

  std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> grad = h.gradient;
  if (!grad) {
    // Central differences with step relative to |z|; the symbols are smooth
    // away from the origin, where ZeroCrossing aborts anyway.
    grad = [value = h.value](double t, const Eigen::VectorXd& z) {
      const double step = 1e-5 * std::max(z.norm(), 1e-30);
      Eigen::VectorXd g(z.size());
      Eigen::VectorXd probe = z;
      for (int i = 0; i < z.size(); ++i) {
        probe(i) = z(i) + step;
        const double fp = value(t, probe);
        probe(i) = z(i) - step;
        const double fm = value(t, probe);
        probe(i) = z(i);
        g(i) = (fp - fm) / (2.0 * step);
      }
      return g;
    };
  }
  const Eigen::MatrixXd omega = symplectic_form(h.dimension);
  auto field = [&](double t, const Eigen::VectorXd& z) -> Eigen::VectorXd {
    return omega * grad(t, z);
  };

  const int n = static_cast<int>(std::ceil(std::abs(span) / dt));
  const double step = span / n;
  const double floor_norm = 1e-8 * z0.norm();
  Eigen::VectorXd z = z0;
  double t = t0;
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd k1 = field(t, z);
    const Eigen::VectorXd k2 = field(t + 0.5 * step, z + (0.5 * step) * k1);
    const Eigen::VectorXd k3 = field(t + 0.5 * step, z + (0.5 * step) * k2);
    const Eigen::VectorXd k4 = field(t + step, z + step * k3);
    z += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = t0 + (k + 1) * step;
    if (z.norm() < floor_norm) {
      std::ostringstream msg;
      msg << "flow_numeric: trajectory contracted to |z| = " << z.norm()
          << " at t = " << t << " (started at |z0| = " << z0.norm() << ")";
      throw ZeroCrossing(msg.str());
    }
  }
  FlowResult r;
  r.endpoint = std::move(z);
  return r;
}

namespace {

double endpoint_angle(const FlowResult& r) {
  return wrap_angle(std::atan2(r.endpoint(1), r.endpoint(0)));
}

}  // namespace

double direction_map(const QuadraticHamiltonian& q, double t, double theta) {
  if (q.dimension != 1) {
    throw DimensionMismatch("direction_map: angles parameterize directions only for d = 1");
  }
  Eigen::VectorXd z0(2);
  z0 << std::cos(theta), std::sin(theta);
  return endpoint_angle(flow_quadratic(q, t, z0));
}

double direction_map(const HamiltonianField& h, double t0, double t1,
                     double theta, double dt) {
  if (h.dimension != 1) {
    throw DimensionMismatch("direction_map: angles parameterize directions only for d = 1");
  }
  Eigen::VectorXd z0(2);
  z0 << std::cos(theta), std::sin(theta);
  return endpoint_angle(flow_numeric(h, t0, t1, z0, dt));
}

}  // namespace phasefront
