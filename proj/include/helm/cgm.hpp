#pragma once

// Conjugate-gradient minimization of J over the outer-boundary data f.
// The reduced problem q(f) = J(u(f)) is an exact convex quadratic (affine
// state map composed with a quadratic form), so this is textbook CG with
// exact line search: gradients via one adjoint solve, Hessian actions via
// one variation solve plus one adjoint solve. Inner products on boundary
// data use the L2(Gamma_out) mass matrix.

#include <vector>

#include <Eigen/Dense>

#include "helm/fem.hpp"
#include "helm/functional.hpp"

namespace helm {

struct CgmConfig {
  double epsilon = 1e-8;  // stop when |g_m| / |g_0| <= epsilon
  int max_iterations = 500;
  Eigen::VectorXcd initial_f; // empty means zero
  int restart_interval = 50;  // direction reset to steepest descent
};

struct CgmIterate {
  int m = 0;
  double J = 0;
  double gamma = 0;     // stopping scalar |g_m| / |g_0|
  double rho = 0;       // line-search step
  double grad_norm = 0; // |g_m| in L2(Gamma_out)
};

struct CgmRun {
  Eigen::VectorXcd f_star;
  ComplexField u_star;
  std::vector<CgmIterate> history;
  bool converged = false;
  int iterations = 0;
  double final_J = 0;
  FunctionalConfig functional;
};

CgmRun minimize(const HelmholtzProblem& problem, FunctionalConfig functional,
                const CgmConfig& config = {});

// Variant reusing an existing factorization.
CgmRun minimize(const HelmholtzOperator& op, FunctionalConfig functional,
                const CgmConfig& config = {});

// d_R = sqrt(J(u_star)) for a converged weighted run.
double minimized_seminorm(const CgmRun& run);

} // namespace helm
