#include "helm/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>

#include "helm/errors.hpp"
#include "helm/quadrature.hpp"

namespace helm {
namespace {

struct QpRef {
  Cplx value;
  Eigen::Vector2cd grad;
};

// Shared accumulation for both reference flavors: provider(t, x) returns
// the reference value/gradient at a quadrature point of triangle t.
template <typename Provider>
ErrorReport error_norms_impl(const ComplexField& num, const TriMesh& mesh, const RegionMask& mask,
                             Region region, double k, const RefractionModel& refraction,
                             FunctionalConfig config, Provider&& provider) {
  double l2_diff = 0, l2_ref = 0, h1s_diff = 0, h1s_ref = 0, j_diff = 0, j_ref = 0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const double mw = mask.element_weights[t];
    if (mw == 0) continue;
    const auto& tri = mesh.triangles[t];
    const Eigen::Vector2d& a = mesh.vertices[tri[0]];
    const Eigen::Vector2d& b = mesh.vertices[tri[1]];
    const Eigen::Vector2d& c = mesh.vertices[tri[2]];
    const double area = mesh.triangle_area(t);
    const Eigen::Vector2d grad_l[3] = {
        Eigen::Vector2d(b.y() - c.y(), c.x() - b.x()) / (2 * area),
        Eigen::Vector2d(c.y() - a.y(), a.x() - c.x()) / (2 * area),
        Eigen::Vector2d(a.y() - b.y(), b.x() - a.x()) / (2 * area)};
    Eigen::Vector2cd grad_num = Eigen::Vector2cd::Zero();
    for (int i = 0; i < 3; ++i) grad_num += num.values[tri[i]] * grad_l[i].cast<Cplx>();
    for (const auto& qp : tri_quadrature_7) {
      const double lam[3] = {qp.l0, qp.l1, qp.l2};
      const Eigen::Vector2d x = lam[0] * a + lam[1] * b + lam[2] * c;
      const QpRef ref = provider(t, x, lam);
      Cplx u_num = 0;
      for (int i = 0; i < 3; ++i) u_num += lam[i] * num.values[tri[i]];
      const Cplx d = u_num - ref.value;
      const Eigen::Vector2cd gd = grad_num - ref.grad;
      const double w = qp.w * area * mw;
      l2_diff += w * std::norm(d);
      l2_ref += w * std::norm(ref.value);
      h1s_diff += w * gd.squaredNorm();
      h1s_ref += w * ref.grad.squaredNorm();
      const double r = x.norm();
      const double nv = refraction(x);
      const Eigen::Vector2cd xhat = (x / r).cast<Cplx>();
      const double jw = w * (config.weighted ? 1.0 / (1.0 + r) : 1.0);
      const Eigen::Vector2cd res_d = gd - Cplx(0, 1) * (k * nv) * d * xhat;
      const Eigen::Vector2cd res_r = ref.grad - Cplx(0, 1) * (k * nv) * ref.value * xhat;
      j_diff += jw * res_d.squaredNorm();
      j_ref += jw * res_r.squaredNorm();
    }
  }
  if (!(l2_ref > 0) || !(l2_ref + h1s_ref > 0) || !(j_ref > 0))
    throw ZeroReference("error_norms: reference norm is zero on the requested region");
  ErrorReport rep;
  rep.region = region;
  rep.L2 = std::sqrt(l2_diff);
  rep.L2_rel = rep.L2 / std::sqrt(l2_ref);
  rep.H1 = std::sqrt(l2_diff + h1s_diff);
  rep.H1_rel = rep.H1 / std::sqrt(l2_ref + h1s_ref);
  rep.dJ_rel = j_diff / j_ref;
  return rep;
}

} // namespace

ErrorReport error_norms(const ComplexField& num, const ComplexField& ref, const TriMesh& mesh,
                        const RegionMask& mask, Region region, double k,
                        const RefractionModel& refraction, FunctionalConfig config) {
  if (ref.values.size() != mesh.vertex_count())
    throw Error("error_norms: reference field size does not match the mesh");
  return error_norms_impl(
      num, mesh, mask, region, k, refraction, config,
      [&](int t, const Eigen::Vector2d&, const double lam[3]) {
        const auto& tri = mesh.triangles[t];
        const Eigen::Vector2d& a = mesh.vertices[tri[0]];
        const Eigen::Vector2d& b = mesh.vertices[tri[1]];
        const Eigen::Vector2d& c = mesh.vertices[tri[2]];
        const double area = mesh.triangle_area(t);
        const Eigen::Vector2d grad_l[3] = {
            Eigen::Vector2d(b.y() - c.y(), c.x() - b.x()) / (2 * area),
            Eigen::Vector2d(c.y() - a.y(), a.x() - c.x()) / (2 * area),
            Eigen::Vector2d(a.y() - b.y(), b.x() - a.x()) / (2 * area)};
        QpRef out{0, Eigen::Vector2cd::Zero()};
        for (int i = 0; i < 3; ++i) {
          out.value += lam[i] * ref.values[tri[i]];
          out.grad += ref.values[tri[i]] * grad_l[i].cast<Cplx>();
        }
        return out;
      });
}

ErrorReport error_norms(const ComplexField& num, const ModeSolution& ref, const TriMesh& mesh,
                        const RegionMask& mask, Region region, double k,
                        const RefractionModel& refraction, FunctionalConfig config) {
  return error_norms_impl(num, mesh, mask, region, k, refraction, config,
                          [&](int, const Eigen::Vector2d& x, const double[3]) {
                            return QpRef{exact_mode(ref, x), exact_mode_gradient(ref, x)};
                          });
}

std::string shape_name(Shape s) {
  switch (s) {
    case Shape::Annulus:
      return "annulus";
    case Shape::EllipseHole:
      return "ellipse";
    case Shape::SquareHole:
      return "square";
  }
  return "?";
}

namespace {

HelmholtzProblem make_problem(const TriMesh& mesh, int j, double k,
                              const RefractionModel& refraction, OuterKind outer) {
  HelmholtzProblem p;
  p.mesh = &mesh;
  p.k = k;
  p.refraction = refraction;
  p.inner_data = [j](const Eigen::Vector2d& x) {
    return Cplx(std::cos(j * std::atan2(x.y(), x.x())), 0.0);
  };
  p.outer_kind = outer;
  return p;
}

StudyRow study_row_constant(const StudySpec& spec, Shape shape, const TriMesh& mesh, int j,
                            double k, double R) {
  const auto t0 = std::chrono::steady_clock::now();
  HelmholtzProblem problem = make_problem(mesh, j, k, spec.refraction, spec.outer);
  const CgmRun run = minimize(problem, FunctionalConfig{spec.weighted}, spec.cgm);
  const ModeSolution oracle{j, k, spec.r_hat};
  const RegionMask ann = region_mask(mesh, Region::AnnulusUnit);
  const RegionMask full = region_mask(mesh, Region::FullDomain);
  StudyRow row;
  row.shape = shape;
  row.refraction_tag = spec.refraction.tag();
  row.j = j;
  row.k = k;
  row.R = R;
  row.annulus_unit = error_norms(run.u_star, oracle, mesh, ann, Region::AnnulusUnit, k,
                                 spec.refraction, FunctionalConfig{spec.weighted});
  row.full = error_norms(run.u_star, oracle, mesh, full, Region::FullDomain, k, spec.refraction,
                         FunctionalConfig{spec.weighted});
  row.iterations = run.iterations;
  row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (spec.on_row) spec.on_row(row, run);
  return row;
}

} // namespace

std::vector<StudyRow> convergence_study(const StudySpec& spec) {
  std::vector<StudyRow> rows;
  const bool variable = !spec.refraction.is_constant();
  if (variable) {
    for (Shape s : spec.shapes)
      if (s != Shape::Annulus)
        throw ValidationError(
            "convergence_study: variable-index self-reference requires the annulus domain");
  }
  for (Shape shape : spec.shapes) {
    if (shape == Shape::Annulus) {
      double r_max = spec.R_ref;
      for (double R : spec.Rs) r_max = std::max(r_max, R);
      if (!variable) r_max = *std::max_element(spec.Rs.begin(), spec.Rs.end());
      const NestedAnnulusFamily family(spec.r_hat, r_max, spec.h);

      ComplexField u_ref; // reference on the R_ref mesh (variable n only)
      TriMesh ref_mesh;
      if (variable) ref_mesh = family.mesh_up_to(spec.R_ref);
      for (int j : spec.js)
        for (double k : spec.ks) {
          if (variable) {
            HelmholtzProblem ref_problem =
                make_problem(ref_mesh, j, k, spec.refraction, spec.outer);
            u_ref = minimize(ref_problem, FunctionalConfig{spec.weighted}, spec.cgm).u_star;
          }
          for (double R : spec.Rs) {
            const TriMesh mesh = family.mesh_up_to(R);
            if (!variable) {
              rows.push_back(study_row_constant(spec, shape, mesh, j, k, family.snap(R)));
              continue;
            }
            const auto t0 = std::chrono::steady_clock::now();
            HelmholtzProblem problem = make_problem(mesh, j, k, spec.refraction, spec.outer);
            const CgmRun run = minimize(problem, FunctionalConfig{spec.weighted}, spec.cgm);
            // nested meshes: restriction is a prefix of the nodal vector
            ComplexField ref_restricted;
            ref_restricted.values = u_ref.values.head(mesh.vertex_count());
            const RegionMask ann = region_mask(mesh, Region::AnnulusUnit);
            const RegionMask full = region_mask(mesh, Region::FullDomain);
            StudyRow row;
            row.shape = shape;
            row.refraction_tag = spec.refraction.tag();
            row.j = j;
            row.k = k;
            row.R = family.snap(R);
            row.annulus_unit =
                error_norms(run.u_star, ref_restricted, mesh, ann, Region::AnnulusUnit, k,
                            spec.refraction, FunctionalConfig{spec.weighted});
            row.full = error_norms(run.u_star, ref_restricted, mesh, full, Region::FullDomain, k,
                                   spec.refraction, FunctionalConfig{spec.weighted});
            row.iterations = run.iterations;
            row.wall_time =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (spec.on_row) spec.on_row(row, run);
            rows.push_back(row);
          }
        }
    } else {
      for (int j : spec.js)
        for (double k : spec.ks)
          for (double R : spec.Rs) {
            const TriMesh mesh = build_mesh(DomainSpec{shape, spec.r_hat, R}, spec.h);
            rows.push_back(study_row_constant(spec, shape, mesh, j, k, R));
          }
    }
  }
  return rows;
}

std::vector<ScanCurve> divergence_scan(const std::vector<double>& a_values,
                                       const std::vector<double>& R_values, double k, int j,
                                       double r_hat, double h, const CgmConfig& cgm,
                                       const std::function<void(const ScanCurve&)>& on_curve) {
  const double r_max = *std::max_element(R_values.begin(), R_values.end());
  const NestedAnnulusFamily family(r_hat, r_max, h);
  std::vector<TriMesh> meshes;
  meshes.reserve(R_values.size());
  for (double R : R_values) meshes.push_back(family.mesh_up_to(R));

  std::vector<ScanCurve> curves;
  for (double a : a_values) {
    ScanCurve curve;
    curve.a = a;
    const RefractionModel model =
        (a == 0.0) ? RefractionModel::constant(2.0) : RefractionModel::angular_linear(a);
    for (std::size_t i = 0; i < meshes.size(); ++i) {
      HelmholtzProblem problem = make_problem(meshes[i], j, k, model, OuterKind::Neumann);
      const CgmRun run = minimize(problem, FunctionalConfig{/*weighted=*/true}, cgm);
      curve.R.push_back(family.snap(R_values[i]));
      curve.J.push_back(run.final_J);
    }
    const std::size_t n = curve.J.size();
    if (n >= 2 && curve.J[n - 2] > 0) {
      curve.bounded = (curve.J[n - 1] - curve.J[n - 2]) / curve.J[n - 2] < 0.05;
    } else {
      curve.bounded = true;
    }
    if (on_curve) on_curve(curve);
    curves.push_back(std::move(curve));
  }
  return curves;
}

void write_study_csv(const std::vector<StudyRow>& rows, std::ostream& out) {
  out.precision(12);
  out << "shape,refraction,j,k,R,"
         "L2_ann,L2_rel_ann,H1_ann,H1_rel_ann,dJ_rel_ann,"
         "L2_full,L2_rel_full,H1_full,H1_rel_full,dJ_rel_full,"
         "iterations,wall_time\n";
  for (const auto& r : rows) {
    out << shape_name(r.shape) << "," << r.refraction_tag << "," << r.j << "," << r.k << ","
        << r.R << "," << r.annulus_unit.L2 << "," << r.annulus_unit.L2_rel << ","
        << r.annulus_unit.H1 << "," << r.annulus_unit.H1_rel << "," << r.annulus_unit.dJ_rel
        << "," << r.full.L2 << "," << r.full.L2_rel << "," << r.full.H1 << "," << r.full.H1_rel
        << "," << r.full.dJ_rel << "," << r.iterations << "," << r.wall_time << "\n";
  }
}

void write_scan_csv(const std::vector<ScanCurve>& curves, std::ostream& out) {
  out.precision(12);
  out << "a,R,J,classification\n";
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.R.size(); ++i)
      out << c.a << "," << c.R[i] << "," << c.J[i] << ","
          << (c.bounded ? "bounded" : "growing") << "\n";
}

} // namespace helm
