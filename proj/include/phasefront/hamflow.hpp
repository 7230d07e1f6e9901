#pragma once

#include <Eigen/Dense>
#include <functional>

#include "phasefront/errors.hpp"

// Hamiltonian phase-space flows. Quadratic forms a(z) = z^T A z / 2 flow
// exactly through the matrix exponential of t * Omega * A; general symbols
// that are positively homogeneous of degree 2 in z = (x, xi) flow through a
// classical RK4 integrator. In the plane the flow acts on directions, which
// is the action the singularity-propagation checks consume.
namespace phasefront {

// Standard symplectic matrix [[0, I], [-I, 0]] acting on z = (x, xi).
Eigen::MatrixXd symplectic_form(int dimension);

struct QuadraticHamiltonian {
  int dimension = 1;   // d; phase space is 2d-dimensional
  Eigen::MatrixXd A;   // 2d x 2d symmetric; a(z) = z^T A z / 2

  double value(const Eigen::VectorXd& z) const { return 0.5 * z.dot(A * z); }
};

// Validates shape (even, >= 2) and symmetry (1e-12 relative).
QuadraticHamiltonian make_quadratic(const Eigen::MatrixXd& A);

// a = (x^2 + xi^2) / 2 in each of d degrees of freedom: A = identity.
QuadraticHamiltonian harmonic_oscillator(int dimension = 1);

// Possibly time-dependent symbol a(t, z), positively homogeneous of degree 2
// in z. The gradient is optional; when absent, flows fall back to central
// differences with relative step 1e-5.
struct HamiltonianField {
  int dimension = 1;
  std::function<double(double, const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> gradient;
  double t_begin = 0.0;
  double t_end = 1.0;
};

// Checks degree-2 homogeneity a(t, l z) = l^2 a(t, z) for l in {2, 3} on a
// deterministic sample of (t, z); throws NotHomogeneous past 1e-8 relative.
HamiltonianField make_field(
    int dimension, std::function<double(double, const Eigen::VectorXd&)> value,
    std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> gradient,
    double t_begin, double t_end);

struct FlowResult {
  Eigen::VectorXd endpoint;  // z(t)
  Eigen::MatrixXd jacobian;  // D chi_t; 0 x 0 when not computed

  bool has_jacobian() const { return jacobian.size() > 0; }
};

// Exact flow z(t) = exp(t Omega A) z0 with Jacobian exp(t Omega A).
// Throws ZeroPoint if z0 = 0 (the flow lives on R^{2d} minus the origin).
FlowResult flow_quadratic(const QuadraticHamiltonian& q, double t,
                          const Eigen::VectorXd& z0);

// RK4 integration of dz/dt = Omega grad_z a(t, z) from t0 to t1 (either
// direction). Requires 0 < dt <= |t1 - t0| / 16. Throws ZeroCrossing if the
// trajectory contracts below 1e-8 |z0|.
FlowResult flow_numeric(const HamiltonianField& h, double t0, double t1,
                        const Eigen::VectorXd& z0, double dt);

// Projective action on directions (d = 1 only): the angle of chi_t applied
// to the unit vector at angle theta, wrapped to [0, 2 pi).
double direction_map(const QuadraticHamiltonian& q, double t, double theta);
double direction_map(const HamiltonianField& h, double t0, double t1,
                     double theta, double dt);

}  // namespace phasefront
