#pragma once

// Integer-order Bessel/Hankel functions and the closed-form outgoing mode
// solutions for the constant-index exterior disk problem. Implemented
// in-repo; supported envelope: x in [0.05, 200], order <= 60, absolute
// accuracy ~1e-12 on order-unity magnitudes.

#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace helm {

using Cplx = std::complex<double>;

double bessel_j(int order, double x);
double bessel_y(int order, double x);
Cplx hankel1(int order, double x);

// d/dx of H^1_order, via H' = H_{order-1} - (order/x) H_order.
Cplx hankel1_derivative(int order, double x);

// Outgoing single mode u(r,theta) = H^1_j(kr)/H^1_j(k r_hat) * cos(j theta),
// the exact solution for inner Dirichlet data g = cos(j theta).
struct ModeSolution {
  int j = 0;
  double k = 1.0;
  double r_hat = 0.5;
};

Cplx exact_mode(const ModeSolution& mode, const Eigen::Vector2d& point);
Eigen::Vector2cd exact_mode_gradient(const ModeSolution& mode, const Eigen::Vector2d& point);

// Outward-radial (Neumann) trace d u / d r at |point| = r.
Cplx exact_mode_radial_derivative(const ModeSolution& mode, const Eigen::Vector2d& point);

// Truncated separation-of-variables series for general inner Dirichlet data
// g(theta); the l = 0 term carries a 1/2 factor. Quadrature over theta~ is a
// periodic trapezoid rule with quad_points nodes. Test support only.
Cplx series_solution(const std::function<Cplx(double)>& g, int ell_max, double k, double r_hat,
                     const Eigen::Vector2d& point, int quad_points = 512);

} // namespace helm
