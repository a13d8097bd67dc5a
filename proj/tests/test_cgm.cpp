#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helm/analysis.hpp"
#include "helm/cgm.hpp"
#include "helm/errors.hpp"
#include "helm/special.hpp"

using namespace helm;

namespace {

HelmholtzProblem mode_problem(const TriMesh& mesh, int j, double k,
                              RefractionModel n = RefractionModel::constant(1.0),
                              OuterKind outer = OuterKind::Neumann) {
  HelmholtzProblem p;
  p.mesh = &mesh;
  p.k = k;
  p.refraction = n;
  p.inner_data = [j](const Eigen::Vector2d& x) {
    return Cplx(std::cos(j * std::atan2(x.y(), x.x())), 0.0);
  };
  p.outer_kind = outer;
  return p;
}

Eigen::VectorXcd random_trace(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = Cplx(u(rng), u(rng));
  return v;
}

} // namespace

TEST_CASE("zero inner data converges immediately to the zero field") {
  const TriMesh mesh = build_mesh(DomainSpec{Shape::Annulus, 0.5, 1.0}, 0.15);
  HelmholtzProblem p;
  p.mesh = &mesh;
  p.k = 1.0;
  const CgmRun run = minimize(p, FunctionalConfig{});
  CHECK(run.converged);
  CHECK(run.iterations == 0);
  CHECK(run.f_star.norm() == 0.0);
  CHECK(run.u_star.values.norm() == 0.0);
  CHECK(run.final_J == 0.0);
}

TEST_CASE("adjoint gradient matches central finite differences of the reduced functional") {
  const TriMesh mesh = build_mesh(DomainSpec{Shape::Annulus, 0.5, 2.0}, 0.25);
  for (OuterKind outer : {OuterKind::Neumann, OuterKind::Dirichlet}) {
    HelmholtzProblem p = mode_problem(mesh, 2, 1.0, RefractionModel::angular_linear(0.1), outer);
    const HelmholtzOperator op(p);
    const int n_out = static_cast<int>(op.system().outer_loop.size());
    const FunctionalConfig cfg{true};

    auto q_of = [&](const Eigen::VectorXcd& f) {
      return eval_J(op.state(f), mesh, p.k, p.refraction, cfg).J;
    };
    const Eigen::VectorXcd f0 = random_trace(n_out, 17);
    const ComplexField u0 = op.state(f0);
    const Eigen::VectorXcd grad = op.boundary_gradient(
        gradient_source_full(u0, mesh, p.k, p.refraction, cfg));
    const double q0 = q_of(f0);
    for (unsigned seed = 0; seed < 5; ++seed) {
      Eigen::VectorXcd dir = random_trace(n_out, 100 + seed);
      dir /= dir.norm();
      const double t = 1e-4;
      const double fd = (q_of(f0 + t * dir) - q_of(f0 - t * dir)) / (2.0 * t);
      const double dq = op.boundary_inner(grad, dir);
      CHECK(std::abs(fd - dq) <= 1e-5 * std::max(1.0, std::abs(dq)) + 1e-10 * q0);
    }
  }
}

namespace {

// Continuum minimizer for j = 0 data, computed without any FEM: on the
// rotation-invariant subspace the feasible states are u_out + t * v with
// v the standing mode vanishing on the inner circle, and the functional
// is minimized by a complex projection. Simpson rule over the radius.
struct SymmetricOracle {
  double L2_rel = 0, H1_rel = 0, J_min = 0;
};

SymmetricOracle symmetric_minimizer(double k, double r_hat, double R) {
  const Cplx i1(0, 1);
  const double j0h = bessel_j(0, k * r_hat), y0h = bessel_y(0, k * r_hat);
  const Cplx h0h = hankel1(0, k * r_hat);
  auto u_out = [&](double r) { return hankel1(0, k * r) / h0h; };
  auto up_out = [&](double r) { return -k * hankel1(1, k * r) / h0h; };
  auto v = [&](double r) { return y0h * bessel_j(0, k * r) - j0h * bessel_y(0, k * r); };
  auto vp = [&](double r) {
    return k * (-y0h * bessel_j(1, k * r) + j0h * bessel_y(1, k * r));
  };
  auto res_out = [&](double r) { return up_out(r) - i1 * k * u_out(r); };
  auto res_v = [&](double r) { return vp(r) - i1 * k * v(r); };
  auto simpson = [](auto f, double a, double b) {
    const int n = 8000;
    Cplx s = 0;
    const double dr = (b - a) / n;
    for (int i = 0; i <= n; ++i) {
      const double r = a + i * dr;
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      s += w * f(r) * r;
    }
    return s * (dr / 3.0) * (2.0 * std::numbers::pi);
  };
  const double a_vv = simpson([&](double r) { return Cplx(std::norm(res_v(r)), 0); }, r_hat, R)
                          .real();
  const Cplx b_vo = simpson([&](double r) { return std::conj(res_v(r)) * res_out(r); }, r_hat, R);
  const double c_oo =
      simpson([&](double r) { return Cplx(std::norm(res_out(r)), 0); }, r_hat, R).real();
  const Cplx t = -b_vo / a_vv;
  SymmetricOracle out;
  out.J_min = c_oo - std::norm(b_vo) / a_vv;
  const double l2d =
      simpson([&](double r) { return Cplx(std::norm(t * v(r)), 0); }, r_hat, 1.0).real();
  const double l2r =
      simpson([&](double r) { return Cplx(std::norm(u_out(r)), 0); }, r_hat, 1.0).real();
  const double h1d =
      l2d + simpson([&](double r) { return Cplx(std::norm(t * vp(r)), 0); }, r_hat, 1.0).real();
  const double h1r =
      l2r + simpson([&](double r) { return Cplx(std::norm(up_out(r)), 0); }, r_hat, 1.0).real();
  out.L2_rel = std::sqrt(l2d / l2r);
  out.H1_rel = std::sqrt(h1d / h1r);
  return out;
}

} // namespace

TEST_CASE("descent is monotone and the minimizer matches the symmetric-subspace oracle") {
  const NestedAnnulusFamily family(0.5, 2.0, 0.1);
  for (double R : {1.0, 2.0}) {
    const TriMesh mesh = family.mesh_up_to(R);
    HelmholtzProblem p = mode_problem(mesh, 0, 1.0);
    const CgmRun run = minimize(p, FunctionalConfig{});
    CHECK(run.converged);
    for (std::size_t i = 1; i < run.history.size(); ++i)
      CHECK(run.history[i].J <= run.history[i - 1].J + 1e-12 * run.history[0].J);

    const ModeSolution oracle{0, 1.0, 0.5};
    const RegionMask ann = region_mask(mesh, Region::AnnulusUnit);
    const ErrorReport rep = error_norms(run.u_star, oracle, mesh, ann, Region::AnnulusUnit, 1.0,
                                        p.refraction, FunctionalConfig{});
    const SymmetricOracle truth = symmetric_minimizer(1.0, 0.5, R);
    CHECK(rep.L2_rel == doctest::Approx(truth.L2_rel).epsilon(0.02));
    CHECK(rep.H1_rel == doctest::Approx(truth.H1_rel).epsilon(0.02));
    CHECK(run.final_J == doctest::Approx(truth.J_min).epsilon(0.02));
  }
}

TEST_CASE("Dirichlet and Neumann outer control agree on the smooth annulus") {
  const NestedAnnulusFamily family(0.5, 2.0, 0.1);
  const TriMesh mesh = family.mesh_up_to(2.0);
  const ModeSolution oracle{0, 1.0, 0.5};
  const RegionMask ann = region_mask(mesh, Region::AnnulusUnit);

  HelmholtzProblem pn = mode_problem(mesh, 0, 1.0);
  HelmholtzProblem pd = mode_problem(mesh, 0, 1.0, RefractionModel::constant(1.0),
                                     OuterKind::Dirichlet);
  const CgmRun rn = minimize(pn, FunctionalConfig{});
  const CgmRun rd = minimize(pd, FunctionalConfig{});
  CHECK(rn.converged);
  CHECK(rd.converged);

  const double err_n = error_norms(rn.u_star, oracle, mesh, ann, Region::AnnulusUnit, 1.0,
                                   pn.refraction, FunctionalConfig{})
                           .L2;
  const double err_d = error_norms(rd.u_star, oracle, mesh, ann, Region::AnnulusUnit, 1.0,
                                   pd.refraction, FunctionalConfig{})
                           .L2;
  ComplexField diff;
  diff.values = rn.u_star.values - rd.u_star.values;
  // masked L2 of the difference via the error machinery against zero offset
  double l2_diff = 0;
  {
    ComplexField zero;
    zero.values = Eigen::VectorXcd::Zero(mesh.vertex_count());
    // reference cannot be zero, so measure || (u_n - u_d) || as L2 of diff vs zero reference
    // by swapping: use u_n as reference for u_d
    const ErrorReport r = error_norms(rd.u_star, rn.u_star, mesh, ann, Region::AnnulusUnit, 1.0,
                                      pn.refraction, FunctionalConfig{});
    l2_diff = r.L2;
  }
  CHECK(l2_diff <= 2.0 * std::min(err_n, err_d));
}

TEST_CASE("minimized_seminorm guards and d_R monotonicity on nested meshes") {
  const NestedAnnulusFamily family(0.5, 2.0, 0.15);
  std::vector<double> d_values;
  for (double R : {1.0, 2.0}) {
    const TriMesh mesh = family.mesh_up_to(R);
    HelmholtzProblem p = mode_problem(mesh, 0, 1.0, RefractionModel::angular_linear(0.1));
    const CgmRun run = minimize(p, FunctionalConfig{true});
    REQUIRE(run.converged);
    d_values.push_back(minimized_seminorm(run));
  }
  CHECK(d_values[1] >= d_values[0] * (1.0 - 0.02));

  // guard paths: corners couple many boundary modes, so one iteration
  // cannot converge (the annulus j=0 case legitimately does)
  const TriMesh square = build_mesh(DomainSpec{Shape::SquareHole, 0.5, 1.0}, 0.1);
  HelmholtzProblem p = mode_problem(square, 2, 1.0);
  CgmConfig strict;
  strict.epsilon = 1e-14;
  strict.max_iterations = 1;
  const CgmRun short_run = minimize(p, FunctionalConfig{true}, strict);
  CHECK(!short_run.converged);
  CHECK_THROWS_AS(minimized_seminorm(short_run), NotConverged);
  const CgmRun unweighted = minimize(p, FunctionalConfig{false}, strict);
  CHECK_THROWS_AS(minimized_seminorm(unweighted), Error);
}

TEST_CASE("seminorm-to-norm bound holds on minimizer differences") {
  // nested runs at R=1 and R=2; the difference restricted to the smaller
  // mesh has homogeneous inner data, the lemma's hypothesis
  const NestedAnnulusFamily family(0.5, 2.0, 0.1);
  const TriMesh small = family.mesh_up_to(1.0);
  const TriMesh big = family.mesh_up_to(2.0);
  for (const RefractionModel& n :
       {RefractionModel::constant(1.0), RefractionModel::angular_linear(0.1)}) {
    HelmholtzProblem ps = mode_problem(small, 0, 1.0, n);
    HelmholtzProblem pb = mode_problem(big, 0, 1.0, n);
    const CgmRun rs = minimize(ps, FunctionalConfig{true});
    const CgmRun rb = minimize(pb, FunctionalConfig{true});
    REQUIRE(rs.converged);
    REQUIRE(rb.converged);
    ComplexField diff;
    diff.values = rb.u_star.values.head(small.vertex_count()) - rs.u_star.values;
    const SeminormCheck check = seminorm_bound_check(diff, small, 1.0, n);
    CHECK(check.holds);
    CHECK(check.lhs <= check.rhs * 1.05);
  }
}
