#pragma once

// Complex-valued P1 Lagrange discretization of the Helmholtz equation
// with variable index. The bilinear form stored is
//   A(u, phi) = int grad u . grad phi - k^2 int n^2 u phi
// (complex symmetric, no conjugation on the test function); the PDE
// coefficients are real, so one real factorization serves the state (P1),
// adjoint (P2) and variation (P3) solves.

#include <complex>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "helm/geometry.hpp"
#include "helm/parallel.hpp"
#include "helm/refraction.hpp"

namespace helm {

using Cplx = std::complex<double>;

struct ComplexField {
  Eigen::VectorXcd values; // one coefficient per mesh vertex
};

enum class OuterKind { Dirichlet, Neumann };

struct HelmholtzProblem {
  const TriMesh* mesh = nullptr;
  double k = 1.0;
  RefractionModel refraction = RefractionModel::constant(1.0);
  std::function<Cplx(const Eigen::Vector2d&)> inner_data; // g; null means 0
  OuterKind outer_kind = OuterKind::Neumann;
  Eigen::VectorXcd outer_data; // f over the outer loop (empty means 0)
};

struct DofMap {
  std::vector<int> free_of_vertex; // -1 where constrained
  std::vector<int> vertex_of_free;
  int free_count() const { return static_cast<int>(vertex_of_free.size()); }
};

struct AssembledSystem {
  Eigen::SparseMatrix<Cplx> matrix; // free x free, complex symmetric
  Eigen::VectorXcd load;            // for the problem's own boundary data
  DofMap dofs;

  // real-valued views used by the factorization and the boundary machinery
  Eigen::SparseMatrix<double> matrix_real;      // same entries as matrix
  Eigen::SparseMatrix<double> full_matrix_real; // all vertices, no elimination
  std::vector<int> outer_loop;                  // ordered outer vertex ids
  std::vector<int> outer_index_of_vertex;       // -1 if not on the outer loop
  Eigen::SparseMatrix<double> outer_mass;       // L2(Gamma_out) mass matrix
  Eigen::VectorXcd dirichlet_values;            // per vertex, 0 where free
  int n_vertices = 0;
  OuterKind outer_kind = OuterKind::Neumann;
};

AssembledSystem assemble(const HelmholtzProblem& problem,
                         ExecPolicy policy = ExecPolicy::Parallel);

// Direct sparse solve of system.matrix x = system.load with the Dirichlet
// values re-inserted; relative residual at most 1e-10 or SingularSystem.
ComplexField solve(const AssembledSystem& system);

ComplexField solve_state(const HelmholtzProblem& problem);
// P2: same operator, homogeneous inner/outer data, given source on free dofs.
ComplexField solve_adjoint(const HelmholtzProblem& problem_shape,
                           const Eigen::VectorXcd& source_free);
// P3: homogeneous g, outer data w.
ComplexField solve_variation(const HelmholtzProblem& problem_shape,
                             const Eigen::VectorXcd& w_outer);

// One factorization, many right-hand sides; the workhorse behind the CGM.
class HelmholtzOperator {
 public:
  explicit HelmholtzOperator(const HelmholtzProblem& problem,
                             ExecPolicy policy = ExecPolicy::Parallel);
  ~HelmholtzOperator();
  HelmholtzOperator(HelmholtzOperator&&) noexcept;
  HelmholtzOperator& operator=(HelmholtzOperator&&) noexcept;

  const AssembledSystem& system() const { return system_; }
  const HelmholtzProblem& problem() const { return problem_; }

  ComplexField state(const Eigen::VectorXcd& f_outer) const;
  ComplexField state_homogeneous_g(const Eigen::VectorXcd& f_outer) const; // P3
  ComplexField adjoint(const Eigen::VectorXcd& source_free) const;         // P2

  // Reduced L2(Gamma_out) gradient: for Neumann control the trace of the
  // adjoint, for Dirichlet control M^-1 (s_Gamma - A_Gamma,f p).
  Eigen::VectorXcd boundary_gradient(const Eigen::VectorXcd& source_all) const;

  // Re <a, M_Gamma b> inner product on outer-loop data.
  double boundary_inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) const;

  Eigen::VectorXcd solve_free(const Eigen::VectorXcd& rhs_free) const;

 private:
  ComplexField state_impl(const Eigen::VectorXcd& f_outer, bool homogeneous_g) const;
  HelmholtzProblem problem_;
  AssembledSystem system_;
  Eigen::VectorXcd inner_values_; // g at vertices (0 elsewhere)
  struct Factorization;
  std::unique_ptr<Factorization> lu_;
  std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> outer_mass_llt_;
};

// CSV (vertex_index,x,y,re,im) and legacy-VTK exports.
void write_field_csv(const ComplexField& field, const TriMesh& mesh, std::ostream& out);
void write_field_vtk(const ComplexField& field, const TriMesh& mesh, std::ostream& out);

} // namespace helm
