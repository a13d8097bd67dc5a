#include "helm/cgm.hpp"

#include <cmath>

#include "helm/errors.hpp"

namespace helm {

CgmRun minimize(const HelmholtzOperator& op, FunctionalConfig functional,
                const CgmConfig& config) {
  const HelmholtzProblem& problem = op.problem();
  const TriMesh& mesh = *problem.mesh;
  const int n_out = static_cast<int>(op.system().outer_loop.size());

  auto eval = [&](const ComplexField& u) {
    return eval_J(u, mesh, problem.k, problem.refraction, functional).J;
  };
  auto gradient = [&](const ComplexField& u) {
    return op.boundary_gradient(
        gradient_source_full(u, mesh, problem.k, problem.refraction, functional));
  };

  CgmRun run;
  run.functional = functional;
  run.f_star = config.initial_f.size() ? config.initial_f : Eigen::VectorXcd::Zero(n_out);
  if (run.f_star.size() != n_out) throw Error("minimize: initial_f size mismatch");

  ComplexField u = op.state(run.f_star);
  Eigen::VectorXcd g = gradient(u);
  double j_val = eval(u);
  const double g0_norm = std::sqrt(op.boundary_inner(g, g));
  run.history.push_back({0, j_val, g0_norm > 0 ? 1.0 : 0.0, 0.0, g0_norm});
  if (g0_norm == 0.0) {
    run.converged = true;
    run.u_star = std::move(u);
    run.final_J = j_val;
    return run;
  }

  Eigen::VectorXcd w = g;
  double g_norm2_prev = op.boundary_inner(g, g);
  for (int m = 1; m <= config.max_iterations; ++m) {
    // Reduced-Hessian action: variation solve, then adjoint of the
    // linearized source (gradient_source is linear in the field).
    const ComplexField du = op.state_homogeneous_g(w);
    const Eigen::VectorXcd hw = gradient(du);
    const double denom = op.boundary_inner(w, hw);
    if (denom <= 0.0)
      throw StagnationError("minimize: line-search curvature " + std::to_string(denom) +
                            " <= 0 at iteration " + std::to_string(m));
    const double rho = op.boundary_inner(g, w) / denom;
    run.f_star -= rho * w;
    u.values -= rho * du.values;
    g -= rho * hw;
    j_val = eval(u);
    const double g_norm2 = op.boundary_inner(g, g);
    const double g_norm = std::sqrt(g_norm2);
    const double gamma = g_norm / g0_norm;
    run.history.push_back({m, j_val, gamma, rho, g_norm});
    run.iterations = m;
    if (gamma <= config.epsilon) {
      run.converged = true;
      break;
    }
    if (config.restart_interval > 0 && m % config.restart_interval == 0) {
      // resynchronize and restart with steepest descent
      u = op.state(run.f_star);
      g = gradient(u);
      w = g;
      g_norm2_prev = op.boundary_inner(g, g);
      continue;
    }
    const double beta = g_norm2 / g_norm2_prev; // Fletcher-Reeves
    w = g + beta * w;
    g_norm2_prev = g_norm2;
  }

  run.u_star = op.state(run.f_star);
  run.final_J = eval(run.u_star);
  return run;
}

CgmRun minimize(const HelmholtzProblem& problem, FunctionalConfig functional,
                const CgmConfig& config) {
  HelmholtzOperator op(problem);
  return minimize(op, functional, config);
}

double minimized_seminorm(const CgmRun& run) {
  if (!run.functional.weighted)
    throw Error("minimized_seminorm: run used the unweighted functional");
  if (!run.converged) throw NotConverged("minimized_seminorm: run did not converge");
  return std::sqrt(run.final_J);
}

} // namespace helm
