#pragma once

// Error norms against exact or self-referenced solutions, the convergence
// study runner behind the tables, and the guided-mode divergence scan.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "helm/cgm.hpp"
#include "helm/fem.hpp"
#include "helm/functional.hpp"
#include "helm/geometry.hpp"
#include "helm/special.hpp"

namespace helm {

struct ErrorReport {
  double L2 = 0, L2_rel = 0, H1 = 0, H1_rel = 0, dJ_rel = 0;
  Region region = Region::FullDomain;
};

// Reference given as a nodal field on the same mesh.
ErrorReport error_norms(const ComplexField& num, const ComplexField& ref, const TriMesh& mesh,
                        const RegionMask& mask, Region region, double k,
                        const RefractionModel& refraction, FunctionalConfig config);

// Reference given as the exact single-mode oracle (evaluated at quadrature
// points, analytic gradient).
ErrorReport error_norms(const ComplexField& num, const ModeSolution& ref, const TriMesh& mesh,
                        const RegionMask& mask, Region region, double k,
                        const RefractionModel& refraction, FunctionalConfig config);

struct StudyRow {
  Shape shape = Shape::Annulus;
  std::string refraction_tag;
  int j = 0;
  double k = 1, R = 1;
  ErrorReport annulus_unit; // errors on B_1 \ B_{1/2}
  ErrorReport full;         // errors on the whole domain
  int iterations = 0;
  double wall_time = 0; // seconds
};

struct StudySpec {
  std::vector<Shape> shapes = {Shape::Annulus};
  std::vector<int> js = {0};
  std::vector<double> ks = {1.0};
  std::vector<double> Rs = {1, 2, 4, 8};
  RefractionModel refraction = RefractionModel::constant(1.0);
  double r_hat = 0.5;
  double h = 0.1;
  bool weighted = false;
  OuterKind outer = OuterKind::Neumann;
  CgmConfig cgm;
  double R_ref = 8; // self-reference radius for variable indices
  // Called after each completed row (progress/trace hook).
  std::function<void(const StudyRow&, const CgmRun&)> on_row;
};

// Constant n: errors against the exact oracle. Variable n: annulus only,
// errors against the run at R_ref restricted onto the nested smaller meshes.
// Rows are sorted by (shape, j, k, R).
std::vector<StudyRow> convergence_study(const StudySpec& spec);

struct ScanCurve {
  double a = 0;
  std::vector<double> R;
  std::vector<double> J; // weighted J(u_star)
  bool bounded = false;  // last-interval relative growth < 5%
};

std::vector<ScanCurve> divergence_scan(const std::vector<double>& a_values,
                                       const std::vector<double>& R_values, double k, int j,
                                       double r_hat, double h, const CgmConfig& cgm,
                                       const std::function<void(const ScanCurve&)>& on_curve = {});

void write_study_csv(const std::vector<StudyRow>& rows, std::ostream& out);
void write_scan_csv(const std::vector<ScanCurve>& curves, std::ostream& out);

std::string shape_name(Shape s);

} // namespace helm
