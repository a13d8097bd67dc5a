#include "helm/fem.hpp"

#include <cmath>
#include <ostream>

#include "helm/errors.hpp"
#include "helm/quadrature.hpp"

namespace helm {
namespace {

using SpMatD = Eigen::SparseMatrix<double>;
using SpMatC = Eigen::SparseMatrix<Cplx>;
using Triplet = Eigen::Triplet<double>;

Eigen::VectorXcd mul_real(const SpMatD& a, const Eigen::VectorXcd& x) {
  const Eigen::VectorXd xr = x.real();
  const Eigen::VectorXd xi = x.imag();
  const Eigen::VectorXd yr = a * xr;
  const Eigen::VectorXd yi = a * xi;
  Eigen::VectorXcd y(a.rows());
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = Cplx(yr[i], yi[i]);
  return y;
}

struct ElementMatrix {
  double e[3][3];
};

// A(u, phi) = int grad u . grad phi - k^2 int n^2 u phi on one triangle;
// exact P1 stiffness plus degree-5 quadrature for the variable-n mass term.
ElementMatrix element_matrix(const TriMesh& mesh, int t, double k,
                             const RefractionModel& refraction) {
  const auto& tri = mesh.triangles[t];
  const Eigen::Vector2d& a = mesh.vertices[tri[0]];
  const Eigen::Vector2d& b = mesh.vertices[tri[1]];
  const Eigen::Vector2d& c = mesh.vertices[tri[2]];
  const double area = mesh.triangle_area(t);
  if (!(area > 0)) throw InvalidDomain("assemble: nonpositive triangle area");
  const Eigen::Vector2d grad[3] = {
      Eigen::Vector2d(b.y() - c.y(), c.x() - b.x()) / (2 * area),
      Eigen::Vector2d(c.y() - a.y(), a.x() - c.x()) / (2 * area),
      Eigen::Vector2d(a.y() - b.y(), b.x() - a.x()) / (2 * area)};
  ElementMatrix m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m.e[i][j] = area * grad[i].dot(grad[j]);
  const double k2 = k * k;
  for (const auto& qp : tri_quadrature_7) {
    const Eigen::Vector2d x = qp.l0 * a + qp.l1 * b + qp.l2 * c;
    const double nv = refraction(x);
    const double coef = k2 * nv * nv * qp.w * area;
    const double lam[3] = {qp.l0, qp.l1, qp.l2};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m.e[i][j] -= coef * lam[i] * lam[j];
  }
  return m;
}

} // namespace

AssembledSystem assemble(const HelmholtzProblem& problem, ExecPolicy policy) {
  const TriMesh& mesh = *problem.mesh;
  if (problem.refraction.lower_bound() <= 0)
    throw InadmissibleRefraction("assemble: refraction model is not positive (lower bound " +
                                 std::to_string(problem.refraction.lower_bound()) + ")");
  AssembledSystem sys;
  sys.n_vertices = mesh.vertex_count();
  sys.outer_kind = problem.outer_kind;

  sys.outer_loop = mesh.boundary_loop(BoundaryTag::OuterGamma);
  sys.outer_index_of_vertex.assign(sys.n_vertices, -1);
  for (std::size_t i = 0; i < sys.outer_loop.size(); ++i)
    sys.outer_index_of_vertex[sys.outer_loop[i]] = static_cast<int>(i);

  std::vector<char> constrained(sys.n_vertices, 0);
  for (int v : mesh.boundary_vertices(BoundaryTag::InnerGamma)) constrained[v] = 1;
  if (problem.outer_kind == OuterKind::Dirichlet)
    for (int v : sys.outer_loop) constrained[v] = 1;

  sys.dofs.free_of_vertex.assign(sys.n_vertices, -1);
  for (int v = 0; v < sys.n_vertices; ++v)
    if (!constrained[v]) {
      sys.dofs.free_of_vertex[v] = static_cast<int>(sys.dofs.vertex_of_free.size());
      sys.dofs.vertex_of_free.push_back(v);
    }
  const int n_free = sys.dofs.free_count();
  if (n_free == 0) throw EmptyFreeDofs("assemble: every vertex is constrained");

  const int n_tri = mesh.triangle_count();
  std::vector<ElementMatrix> elems(n_tri);
  if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
    for (int t = 0; t < n_tri; ++t) elems[t] = element_matrix(mesh, t, problem.k, problem.refraction);
  } else {
    for (int t = 0; t < n_tri; ++t) elems[t] = element_matrix(mesh, t, problem.k, problem.refraction);
  }

  std::vector<Triplet> trip_free, trip_full;
  trip_free.reserve(static_cast<std::size_t>(n_tri) * 9);
  trip_full.reserve(static_cast<std::size_t>(n_tri) * 9);
  for (int t = 0; t < n_tri; ++t) {
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        trip_full.emplace_back(tri[i], tri[j], elems[t].e[i][j]);
        const int fi = sys.dofs.free_of_vertex[tri[i]];
        const int fj = sys.dofs.free_of_vertex[tri[j]];
        if (fi >= 0 && fj >= 0) trip_free.emplace_back(fi, fj, elems[t].e[i][j]);
      }
  }
  sys.matrix_real.resize(n_free, n_free);
  sys.matrix_real.setFromTriplets(trip_free.begin(), trip_free.end());
  sys.full_matrix_real.resize(sys.n_vertices, sys.n_vertices);
  sys.full_matrix_real.setFromTriplets(trip_full.begin(), trip_full.end());
  sys.matrix = sys.matrix_real.cast<Cplx>();

  // L2 mass matrix on the outer loop (2-point Gauss, exact for P1 traces).
  const int n_out = static_cast<int>(sys.outer_loop.size());
  std::vector<Triplet> trip_mass;
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag != BoundaryTag::OuterGamma) continue;
    const int ia = sys.outer_index_of_vertex[e.a];
    const int ib = sys.outer_index_of_vertex[e.b];
    const double len = (mesh.vertices[e.a] - mesh.vertices[e.b]).norm();
    double maa = 0, mab = 0, mbb = 0;
    for (const auto& q : edge_quadrature_2) {
      maa += q.w * (1 - q.t) * (1 - q.t) * len;
      mab += q.w * (1 - q.t) * q.t * len;
      mbb += q.w * q.t * q.t * len;
    }
    trip_mass.emplace_back(ia, ia, maa);
    trip_mass.emplace_back(ib, ib, mbb);
    trip_mass.emplace_back(ia, ib, mab);
    trip_mass.emplace_back(ib, ia, mab);
  }
  sys.outer_mass.resize(n_out, n_out);
  sys.outer_mass.setFromTriplets(trip_mass.begin(), trip_mass.end());

  // Dirichlet values and the load for the problem's own boundary data.
  sys.dirichlet_values = Eigen::VectorXcd::Zero(sys.n_vertices);
  if (problem.inner_data)
    for (int v : mesh.boundary_vertices(BoundaryTag::InnerGamma))
      sys.dirichlet_values[v] = problem.inner_data(mesh.vertices[v]);
  Eigen::VectorXcd f = problem.outer_data;
  if (f.size() == 0) f = Eigen::VectorXcd::Zero(n_out);
  if (f.size() != n_out) throw Error("assemble: outer_data size does not match the outer loop");
  if (problem.outer_kind == OuterKind::Dirichlet)
    for (int i = 0; i < n_out; ++i) sys.dirichlet_values[sys.outer_loop[i]] = f[i];

  const Eigen::VectorXcd a_dir = mul_real(sys.full_matrix_real, sys.dirichlet_values);
  sys.load = Eigen::VectorXcd::Zero(n_free);
  for (int i = 0; i < n_free; ++i) sys.load[i] = -a_dir[sys.dofs.vertex_of_free[i]];
  if (problem.outer_kind == OuterKind::Neumann) {
    const Eigen::VectorXcd mf = mul_real(sys.outer_mass, f);
    for (int i = 0; i < n_out; ++i) {
      const int fi = sys.dofs.free_of_vertex[sys.outer_loop[i]];
      if (fi >= 0) sys.load[fi] += mf[i];
    }
  }
  return sys;
}

namespace {

struct RealLU {
  Eigen::SparseLU<SpMatD, Eigen::COLAMDOrdering<int>> lu;
  void factorize(const SpMatD& a) {
    lu.analyzePattern(a);
    lu.factorize(a);
    if (lu.info() != Eigen::Success)
      throw SingularSystem("sparse factorization failed (interior resonance or invalid mesh)");
  }
  Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const {
    const Eigen::VectorXd br = b.real(), bi = b.imag();
    const Eigen::VectorXd xr = lu.solve(br), xi = lu.solve(bi);
    Eigen::VectorXcd x(b.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = Cplx(xr[i], xi[i]);
    return x;
  }
};

ComplexField insert_solution(const AssembledSystem& sys, const Eigen::VectorXcd& x_free) {
  ComplexField field;
  field.values = sys.dirichlet_values;
  for (int i = 0; i < sys.dofs.free_count(); ++i)
    field.values[sys.dofs.vertex_of_free[i]] = x_free[i];
  return field;
}

} // namespace

ComplexField solve(const AssembledSystem& sys) {
  RealLU lu;
  lu.factorize(sys.matrix_real);
  Eigen::VectorXcd x = lu.solve(sys.load);
  const double bnorm = sys.load.norm();
  if (bnorm > 0) {
    Eigen::VectorXcd r = sys.load - sys.matrix * x;
    if (r.norm() / bnorm > 1e-12) {
      x += lu.solve(r); // one refinement step
      r = sys.load - sys.matrix * x;
    }
    if (r.norm() / bnorm > 1e-10)
      throw SingularSystem("solve: relative residual " + std::to_string(r.norm() / bnorm) +
                           " above 1e-10 (near-singular system)");
  }
  return insert_solution(sys, x);
}

struct HelmholtzOperator::Factorization {
  RealLU lu;
};

HelmholtzOperator::HelmholtzOperator(const HelmholtzProblem& problem, ExecPolicy policy)
    : problem_(problem), system_(assemble(problem, policy)), lu_(new Factorization) {
  lu_->lu.factorize(system_.matrix_real);
  inner_values_ = Eigen::VectorXcd::Zero(system_.n_vertices);
  if (problem_.inner_data)
    for (int v : problem_.mesh->boundary_vertices(BoundaryTag::InnerGamma))
      inner_values_[v] = problem_.inner_data(problem_.mesh->vertices[v]);
  outer_mass_llt_ = std::make_unique<Eigen::SimplicialLDLT<SpMatD>>();
  outer_mass_llt_->compute(system_.outer_mass);
  if (outer_mass_llt_->info() != Eigen::Success)
    throw SingularSystem("outer boundary mass matrix factorization failed");
}

HelmholtzOperator::~HelmholtzOperator() = default;
HelmholtzOperator::HelmholtzOperator(HelmholtzOperator&&) noexcept = default;
HelmholtzOperator& HelmholtzOperator::operator=(HelmholtzOperator&&) noexcept = default;

Eigen::VectorXcd HelmholtzOperator::solve_free(const Eigen::VectorXcd& rhs_free) const {
  return lu_->lu.solve(rhs_free);
}

ComplexField HelmholtzOperator::state_impl(const Eigen::VectorXcd& f_outer,
                                           bool homogeneous_g) const {
  const int n_out = static_cast<int>(system_.outer_loop.size());
  Eigen::VectorXcd f = f_outer;
  if (f.size() == 0) f = Eigen::VectorXcd::Zero(n_out);
  if (f.size() != n_out) throw Error("state: outer data size does not match the outer loop");

  Eigen::VectorXcd u_dir = homogeneous_g ? Eigen::VectorXcd::Zero(system_.n_vertices).eval()
                                         : inner_values_;
  if (system_.outer_kind == OuterKind::Dirichlet)
    for (int i = 0; i < n_out; ++i) u_dir[system_.outer_loop[i]] = f[i];

  const Eigen::VectorXcd a_dir = mul_real(system_.full_matrix_real, u_dir);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(system_.dofs.free_count());
  for (int i = 0; i < system_.dofs.free_count(); ++i)
    rhs[i] = -a_dir[system_.dofs.vertex_of_free[i]];
  if (system_.outer_kind == OuterKind::Neumann) {
    const Eigen::VectorXcd mf = mul_real(system_.outer_mass, f);
    for (int i = 0; i < n_out; ++i) {
      const int fi = system_.dofs.free_of_vertex[system_.outer_loop[i]];
      if (fi >= 0) rhs[fi] += mf[i];
    }
  }
  const Eigen::VectorXcd x = solve_free(rhs);
  ComplexField field;
  field.values = u_dir;
  for (int i = 0; i < system_.dofs.free_count(); ++i)
    field.values[system_.dofs.vertex_of_free[i]] = x[i];
  return field;
}

ComplexField HelmholtzOperator::state(const Eigen::VectorXcd& f_outer) const {
  return state_impl(f_outer, false);
}

ComplexField HelmholtzOperator::state_homogeneous_g(const Eigen::VectorXcd& f_outer) const {
  return state_impl(f_outer, true);
}

ComplexField HelmholtzOperator::adjoint(const Eigen::VectorXcd& source_free) const {
  const Eigen::VectorXcd x = solve_free(source_free);
  ComplexField field;
  field.values = Eigen::VectorXcd::Zero(system_.n_vertices);
  for (int i = 0; i < system_.dofs.free_count(); ++i)
    field.values[system_.dofs.vertex_of_free[i]] = x[i];
  return field;
}

Eigen::VectorXcd HelmholtzOperator::boundary_gradient(const Eigen::VectorXcd& source_all) const {
  const int n_free = system_.dofs.free_count();
  const int n_out = static_cast<int>(system_.outer_loop.size());
  Eigen::VectorXcd s_free(n_free);
  for (int i = 0; i < n_free; ++i) s_free[i] = source_all[system_.dofs.vertex_of_free[i]];
  const ComplexField p = adjoint(s_free);
  Eigen::VectorXcd g(n_out);
  if (system_.outer_kind == OuterKind::Neumann) {
    for (int i = 0; i < n_out; ++i) g[i] = p.values[system_.outer_loop[i]];
    return g;
  }
  const Eigen::VectorXcd ap = mul_real(system_.full_matrix_real, p.values);
  for (int i = 0; i < n_out; ++i) {
    const int v = system_.outer_loop[i];
    g[i] = source_all[v] - ap[v];
  }
  const Eigen::VectorXd gr = outer_mass_llt_->solve(g.real());
  const Eigen::VectorXd gi = outer_mass_llt_->solve(g.imag());
  for (int i = 0; i < n_out; ++i) g[i] = Cplx(gr[i], gi[i]);
  return g;
}

double HelmholtzOperator::boundary_inner(const Eigen::VectorXcd& a,
                                         const Eigen::VectorXcd& b) const {
  return a.dot(mul_real(system_.outer_mass, b)).real();
}

ComplexField solve_state(const HelmholtzProblem& problem) {
  HelmholtzOperator op(problem);
  return op.state(problem.outer_data);
}

ComplexField solve_adjoint(const HelmholtzProblem& problem_shape,
                           const Eigen::VectorXcd& source_free) {
  HelmholtzOperator op(problem_shape);
  return op.adjoint(source_free);
}

ComplexField solve_variation(const HelmholtzProblem& problem_shape,
                             const Eigen::VectorXcd& w_outer) {
  HelmholtzOperator op(problem_shape);
  return op.state_homogeneous_g(w_outer);
}

void write_field_csv(const ComplexField& field, const TriMesh& mesh, std::ostream& out) {
  out.precision(17);
  out << "vertex_index,x,y,re,im\n";
  for (int v = 0; v < mesh.vertex_count(); ++v)
    out << v << "," << mesh.vertices[v].x() << "," << mesh.vertices[v].y() << ","
        << field.values[v].real() << "," << field.values[v].imag() << "\n";
}

void write_field_vtk(const ComplexField& field, const TriMesh& mesh, std::ostream& out) {
  out.precision(12);
  out << "# vtk DataFile Version 3.0\nhelm-open field\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.vertex_count() << " double\n";
  for (const auto& v : mesh.vertices) out << v.x() << " " << v.y() << " 0\n";
  out << "CELLS " << mesh.triangle_count() << " " << 4 * mesh.triangle_count() << "\n";
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "CELL_TYPES " << mesh.triangle_count() << "\n";
  for (int t = 0; t < mesh.triangle_count(); ++t) out << "5\n";
  out << "POINT_DATA " << mesh.vertex_count() << "\n";
  out << "SCALARS re double 1\nLOOKUP_TABLE default\n";
  for (int v = 0; v < mesh.vertex_count(); ++v) out << field.values[v].real() << "\n";
  out << "SCALARS im double 1\nLOOKUP_TABLE default\n";
  for (int v = 0; v < mesh.vertex_count(); ++v) out << field.values[v].imag() << "\n";
}

} // namespace helm
