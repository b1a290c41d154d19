#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "quadcurl/assembly.hpp"
#include "quadcurl/element.hpp"
#include "quadcurl/manufactured.hpp"
#include "quadcurl/solver.hpp"

namespace {

using namespace quadcurl;

void BM_ReferenceRule(benchmark::State& state) {
  const QuadRule& rule = reference_rule(8);
  for (auto _ : state) {
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) acc += rule.weights[q] * std::pow(rule.points[q].x(), 4);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_ReferenceRule);

void BM_ElementBasis(benchmark::State& state) {
  const Mesh mesh = build_structured_mesh(8);
  int t = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_element_basis(mesh, t));
    t = (t + 1) % mesh.num_triangles();
  }
}
BENCHMARK(BM_ElementBasis);

void BM_EvaluateJet(benchmark::State& state) {
  const Mesh mesh = build_structured_mesh(8);
  const ElementBasis basis = build_element_basis(mesh, 3);
  const Vec2 x = mesh.centroid(3);
  const int order = static_cast<int>(state.range(0));
  BasisJet jet;
  for (auto _ : state) {
    evaluate(basis, x, order, jet);
    benchmark::DoNotOptimize(jet.d[0][0][0]);
  }
}
BENCHMARK(BM_EvaluateJet)->Arg(1)->Arg(3)->Arg(5);

void BM_CutDecomposition(benchmark::State& state) {
  const Mesh mesh = build_structured_mesh(40);
  const InterfaceGeometry circle = levelset_circle(Vec2(0.0, 0.0), std::numbers::pi / 6.0);
  const Classification cls = classify_elements(mesh, circle);
  std::size_t k = 0;
  for (auto _ : state) {
    const int t = cls.t_gamma[k];
    benchmark::DoNotOptimize(decompose_cut_element(mesh, t, circle, cls.tie_epsilon));
    k = (k + 1) % cls.t_gamma.size();
  }
}
BENCHMARK(BM_CutDecomposition);

void BM_Assemble(benchmark::State& state) {
  const ProblemParams params;
  const Experiment ex = make_experiment(1, params);
  const Discretization disc = build_discretization(static_cast<int>(state.range(0)), ex.iface);
  for (auto _ : state) {
    LinearSystem sys = assemble(disc, params, ex.data);
    benchmark::DoNotOptimize(sys.A.nonZeros());
  }
  state.counters["dofs"] = disc.space.total_dofs();
}
BENCHMARK(BM_Assemble)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_Factorize(benchmark::State& state) {
  const ProblemParams params;
  const Experiment ex = make_experiment(1, params);
  const Discretization disc = build_discretization(static_cast<int>(state.range(0)), ex.iface);
  const LinearSystem sys = assemble(disc, params, ex.data);
  for (auto _ : state) {
    SparseCholesky factor(sys.A);
    benchmark::DoNotOptimize(factor.stats().flops);
  }
}
BENCHMARK(BM_Factorize)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
