#pragma once

// The radiation functional J (weighted and unweighted), its discrete
// Gateaux derivative (the adjoint source of P2), the boundary flux
// Im int u_r conj(u), and the seminorm-to-norm bound diagnostic.

#include <vector>

#include <Eigen/Dense>

#include "helm/fem.hpp"
#include "helm/geometry.hpp"
#include "helm/parallel.hpp"
#include "helm/refraction.hpp"

namespace helm {

struct FunctionalConfig {
  bool weighted = false; // true applies the 1/(1+|x|) factor
};

struct FunctionalValue {
  double J = 0;
  // Residual grad u - i k n u x/|x| per quadrature point (7 per triangle,
  // element-major); filled only when requested.
  std::vector<Eigen::Vector2cd> residual_qp;
};

FunctionalValue eval_J(const ComplexField& u, const TriMesh& mesh, double k,
                       const RefractionModel& refraction, FunctionalConfig config,
                       const RegionMask* mask = nullptr,
                       ExecPolicy policy = ExecPolicy::Parallel, bool keep_residual = false);

// Discrete representation s of J'(u): dJ(u; du) = Re <s, du> over nodal
// coefficients (all vertices). This is the vector handed to solve_adjoint.
Eigen::VectorXcd gradient_source_full(const ComplexField& u, const TriMesh& mesh, double k,
                                      const RefractionModel& refraction, FunctionalConfig config,
                                      const RegionMask* mask = nullptr,
                                      ExecPolicy policy = ExecPolicy::Parallel);

// Restriction of gradient_source_full to free dofs.
Eigen::VectorXcd gradient_source(const ComplexField& u, const TriMesh& mesh, double k,
                                 const RefractionModel& refraction, FunctionalConfig config,
                                 const DofMap& dofs, const RegionMask* mask = nullptr,
                                 ExecPolicy policy = ExecPolicy::Parallel);

// Im of the integral of u_r conj(u) over the circle |x| = rho (256-point
// trapezoid rule, element-local interpolation).
double imaginary_flux(const ComplexField& u, const TriMesh& mesh, double rho);

struct SeminormCheck {
  double lhs = 0;  // weighted H1-type norm of u
  double rhs = 0;  // (1 - sup_dev)^-1 [u]_R^2
  bool holds = false;
};

// Requires an admissible model and a discrete Helmholtz solution with
// homogeneous inner data (e.g. a difference of minimizers).
SeminormCheck seminorm_bound_check(const ComplexField& u, const TriMesh& mesh, double k,
                                   const RefractionModel& refraction, double tol = 0.05);

} // namespace helm
