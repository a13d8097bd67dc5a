// Serial-vs-OpenMP comparison for the element kernels (assembly, functional
// evaluation, gradient assembly) on a mid-size annulus mesh.

#include <benchmark/benchmark.h>

#include <cmath>

#include "helm/fem.hpp"
#include "helm/functional.hpp"
#include "helm/geometry.hpp"
#include "helm/parallel.hpp"

namespace {

using namespace helm;

struct Fixture {
  TriMesh mesh;
  HelmholtzProblem problem;
  ComplexField field;

  Fixture() {
    init_threads();
    mesh = build_mesh(DomainSpec{Shape::Annulus, 0.5, 4.0}, 0.05);
    problem.mesh = &mesh;
    problem.k = 1.0;
    problem.refraction = RefractionModel::gaussian_pair();
    problem.inner_data = [](const Eigen::Vector2d& x) {
      return Cplx(std::cos(std::atan2(x.y(), x.x())), 0.0);
    };
    field.values = Eigen::VectorXcd::Zero(mesh.vertex_count());
    for (int v = 0; v < mesh.vertex_count(); ++v) {
      const auto& p = mesh.vertices[v];
      field.values[v] = Cplx(std::sin(p.x()), std::cos(p.y()));
    }
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

void bench_assemble(benchmark::State& state, ExecPolicy policy) {
  auto& f = fixture();
  for (auto _ : state) {
    AssembledSystem sys = assemble(f.problem, policy);
    benchmark::DoNotOptimize(sys.matrix_real.nonZeros());
  }
}

void bench_eval_j(benchmark::State& state, ExecPolicy policy) {
  auto& f = fixture();
  for (auto _ : state) {
    const FunctionalValue v =
        eval_J(f.field, f.mesh, f.problem.k, f.problem.refraction, FunctionalConfig{true},
               nullptr, policy);
    benchmark::DoNotOptimize(v.J);
  }
}

void bench_gradient(benchmark::State& state, ExecPolicy policy) {
  auto& f = fixture();
  for (auto _ : state) {
    const Eigen::VectorXcd s = gradient_source_full(
        f.field, f.mesh, f.problem.k, f.problem.refraction, FunctionalConfig{true}, nullptr,
        policy);
    benchmark::DoNotOptimize(s.norm());
  }
}

} // namespace

BENCHMARK_CAPTURE(bench_assemble, serial, ExecPolicy::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_assemble, openmp, ExecPolicy::Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_eval_j, serial, ExecPolicy::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_eval_j, openmp, ExecPolicy::Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_gradient, serial, ExecPolicy::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_gradient, openmp, ExecPolicy::Parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
