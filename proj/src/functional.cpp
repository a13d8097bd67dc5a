#include "helm/functional.hpp"

#include <cmath>
#include <numbers>

#include "helm/errors.hpp"
#include "helm/quadrature.hpp"

namespace helm {
namespace {

struct ElementContext {
  Eigen::Vector2d grad[3]; // P1 basis gradients
  double area = 0;
};

ElementContext element_context(const TriMesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const Eigen::Vector2d& a = mesh.vertices[tri[0]];
  const Eigen::Vector2d& b = mesh.vertices[tri[1]];
  const Eigen::Vector2d& c = mesh.vertices[tri[2]];
  ElementContext ctx;
  ctx.area = mesh.triangle_area(t);
  ctx.grad[0] = Eigen::Vector2d(b.y() - c.y(), c.x() - b.x()) / (2 * ctx.area);
  ctx.grad[1] = Eigen::Vector2d(c.y() - a.y(), a.x() - c.x()) / (2 * ctx.area);
  ctx.grad[2] = Eigen::Vector2d(a.y() - b.y(), b.x() - a.x()) / (2 * ctx.area);
  return ctx;
}

// Per-element J contribution; optionally records residuals and the nodal
// gradient rows. Both eval_J and gradient_source_full run through here so
// the derivative is exactly consistent with the functional.
struct ElementKernel {
  const TriMesh& mesh;
  double k;
  const RefractionModel& refraction;
  FunctionalConfig config;
  const RegionMask* mask;
  const ComplexField& u;

  template <typename ResidualSink, typename SourceSink>
  double element(int t, ResidualSink&& residual_sink, SourceSink&& source_sink) const {
    const double mw = mask ? mask->element_weights[t] : 1.0;
    const auto& tri = mesh.triangles[t];
    const ElementContext ctx = element_context(mesh, t);
    const Cplx uv[3] = {u.values[tri[0]], u.values[tri[1]], u.values[tri[2]]};
    Eigen::Vector2cd grad_u = Eigen::Vector2cd::Zero();
    for (int i = 0; i < 3; ++i) grad_u += uv[i] * ctx.grad[i].cast<Cplx>();
    double j_elem = 0;
    for (int q = 0; q < static_cast<int>(tri_quadrature_7.size()); ++q) {
      const auto& qp = tri_quadrature_7[q];
      const double lam[3] = {qp.l0, qp.l1, qp.l2};
      const Eigen::Vector2d x = lam[0] * mesh.vertices[tri[0]] + lam[1] * mesh.vertices[tri[1]] +
                                lam[2] * mesh.vertices[tri[2]];
      const double r = x.norm();
      if (r == 0) throw OriginInDomain("eval_J: quadrature point at the origin");
      const Eigen::Vector2d xhat = x / r;
      const double nv = refraction(x);
      const Cplx uq = lam[0] * uv[0] + lam[1] * uv[1] + lam[2] * uv[2];
      const Cplx iknu = Cplx(0, 1) * (k * nv) * uq;
      const Eigen::Vector2cd res = grad_u - iknu * xhat.cast<Cplx>();
      const double w = (config.weighted ? 1.0 / (1.0 + r) : 1.0) * qp.w * ctx.area * mw;
      j_elem += w * res.squaredNorm();
      residual_sink(t * static_cast<int>(tri_quadrature_7.size()) + q, res);
      // 2 w conj(L phi_i) . res with L phi = grad phi - i k n phi xhat
      for (int i = 0; i < 3; ++i) {
        const Cplx xr = xhat.x() * res.x() + xhat.y() * res.y();
        const Cplx s = 2.0 * w *
                       (ctx.grad[i].x() * res.x() + ctx.grad[i].y() * res.y() +
                        Cplx(0, 1) * (k * nv * lam[i]) * xr);
        source_sink(tri[i], s);
      }
    }
    return j_elem;
  }
};

struct NoResidual {
  void operator()(int, const Eigen::Vector2cd&) const {}
};
struct NoSource {
  void operator()(int, const Cplx&) const {}
};

} // namespace

FunctionalValue eval_J(const ComplexField& u, const TriMesh& mesh, double k,
                       const RefractionModel& refraction, FunctionalConfig config,
                       const RegionMask* mask, ExecPolicy policy, bool keep_residual) {
  const int n_tri = mesh.triangle_count();
  ElementKernel kernel{mesh, k, refraction, config, mask, u};
  FunctionalValue out;
  if (keep_residual)
    out.residual_qp.assign(static_cast<std::size_t>(n_tri) * tri_quadrature_7.size(),
                           Eigen::Vector2cd::Zero());
  auto sink = [&](int idx, const Eigen::Vector2cd& r) {
    if (keep_residual) out.residual_qp[idx] = r;
  };
  if (policy == ExecPolicy::Serial) {
    double j = 0;
    for (int t = 0; t < n_tri; ++t) j += kernel.element(t, sink, NoSource{});
    out.J = j;
    return out;
  }
  std::vector<double> per_element(n_tri);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < n_tri; ++t) per_element[t] = kernel.element(t, sink, NoSource{});
  out.J = pairwise_sum(per_element);
  return out;
}

Eigen::VectorXcd gradient_source_full(const ComplexField& u, const TriMesh& mesh, double k,
                                      const RefractionModel& refraction, FunctionalConfig config,
                                      const RegionMask* mask, ExecPolicy policy) {
  const int n_tri = mesh.triangle_count();
  ElementKernel kernel{mesh, k, refraction, config, mask, u};
  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(mesh.vertex_count());
  if (policy == ExecPolicy::Serial) {
    for (int t = 0; t < n_tri; ++t)
      kernel.element(t, NoResidual{}, [&](int v, const Cplx& val) { s[v] += val; });
    return s;
  }
  // Parallel slot fill (3 nodal rows per element), serial fixed-order scatter.
  std::vector<std::array<Cplx, 3>> slots(n_tri);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < n_tri; ++t) {
    std::array<Cplx, 3> local = {Cplx(0), Cplx(0), Cplx(0)};
    const auto& tri = mesh.triangles[t];
    kernel.element(t, NoResidual{}, [&](int v, const Cplx& val) {
      for (int i = 0; i < 3; ++i)
        if (tri[i] == v) local[i] += val;
    });
    slots[t] = local;
  }
  for (int t = 0; t < n_tri; ++t)
    for (int i = 0; i < 3; ++i) s[mesh.triangles[t][i]] += slots[t][i];
  return s;
}

Eigen::VectorXcd gradient_source(const ComplexField& u, const TriMesh& mesh, double k,
                                 const RefractionModel& refraction, FunctionalConfig config,
                                 const DofMap& dofs, const RegionMask* mask, ExecPolicy policy) {
  const Eigen::VectorXcd full = gradient_source_full(u, mesh, k, refraction, config, mask, policy);
  Eigen::VectorXcd s(dofs.free_count());
  for (int i = 0; i < dofs.free_count(); ++i) s[i] = full[dofs.vertex_of_free[i]];
  return s;
}

double imaginary_flux(const ComplexField& u, const TriMesh& mesh, double rho) {
  const TriangleLocator locator(mesh);
  constexpr int n_samples = 256;
  double sum = 0;
  for (int s = 0; s < n_samples; ++s) {
    const double theta = 2.0 * std::numbers::pi * s / n_samples;
    const Eigen::Vector2d x(rho * std::cos(theta), rho * std::sin(theta));
    std::array<double, 3> bary;
    const int t = locator.locate(x, bary);
    if (t < 0)
      throw CircleOutsideDomain("imaginary_flux: circle of radius " + std::to_string(rho) +
                                " leaves the meshed domain");
    const auto& tri = mesh.triangles[t];
    const ElementContext ctx = element_context(mesh, t);
    Cplx uq = 0;
    Eigen::Vector2cd grad_u = Eigen::Vector2cd::Zero();
    for (int i = 0; i < 3; ++i) {
      uq += bary[i] * u.values[tri[i]];
      grad_u += u.values[tri[i]] * ctx.grad[i].cast<Cplx>();
    }
    const Eigen::Vector2d xhat = x / rho;
    const Cplx u_r = grad_u.x() * xhat.x() + grad_u.y() * xhat.y();
    sum += std::imag(u_r * std::conj(uq));
  }
  return sum * (2.0 * std::numbers::pi * rho / n_samples);
}

SeminormCheck seminorm_bound_check(const ComplexField& u, const TriMesh& mesh, double k,
                                   const RefractionModel& refraction, double tol) {
  const double sup = refraction.sup_deviation_bound();
  if (!(sup < 1.0))
    throw InadmissibleRefraction("seminorm_bound_check: sup |1 - n_sharp/n| = " +
                                 std::to_string(sup) + " >= 1");
  SeminormCheck out;
  // lhs: weighted (|grad u|^2 + k^2 n^2 |u|^2), same quadrature as eval_J.
  double lhs = 0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    const ElementContext ctx = element_context(mesh, t);
    Eigen::Vector2cd grad_u = Eigen::Vector2cd::Zero();
    for (int i = 0; i < 3; ++i) grad_u += u.values[tri[i]] * ctx.grad[i].cast<Cplx>();
    for (const auto& qp : tri_quadrature_7) {
      const double lam[3] = {qp.l0, qp.l1, qp.l2};
      const Eigen::Vector2d x = lam[0] * mesh.vertices[tri[0]] + lam[1] * mesh.vertices[tri[1]] +
                                lam[2] * mesh.vertices[tri[2]];
      const double nv = refraction(x);
      Cplx uq = 0;
      for (int i = 0; i < 3; ++i) uq += lam[i] * u.values[tri[i]];
      lhs += qp.w * ctx.area / (1.0 + x.norm()) *
             (grad_u.squaredNorm() + k * k * nv * nv * std::norm(uq));
    }
  }
  out.lhs = lhs;
  const FunctionalValue seminorm =
      eval_J(u, mesh, k, refraction, FunctionalConfig{/*weighted=*/true});
  out.rhs = seminorm.J / (1.0 - sup);
  out.holds = out.lhs <= out.rhs * (1.0 + tol);
  return out;
}

} // namespace helm
