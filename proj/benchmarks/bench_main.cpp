#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "dnlab/cylinder_dn.hpp"
#include "dnlab/elliptic2d.hpp"
#include "dnlab/sturm1d.hpp"
#include "dnlab/yamabe.hpp"

using namespace dnlab;

namespace {

sturm::Potential1D bump_potential() {
  return sturm::Potential1D(AnalyticFn(GaussianTerm{20.0, 50.0, 0.5}), Grid1D(2001));
}

}  // namespace

static void BM_IntegrateFss(benchmark::State& state) {
  const auto q = bump_potential();
  const double mu = double(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sturm::integrate_fss(q, mu));
}
BENCHMARK(BM_IntegrateFss)->Arg(1)->Arg(100)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMicrosecond);

static void BM_DirichletEigenvalues(benchmark::State& state) {
  const auto q = bump_potential();
  const int count = int(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sturm::dirichlet_eigenvalues(q, count));
}
BENCHMARK(BM_DirichletEigenvalues)->Arg(6)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_DnBlocks(benchmark::State& state) {
  const cyl::WarpedCylinder cw(3, AnalyticFn(PolynomialTerm{{1.0, 0.2}}), cyl::Circle{});
  const Function1D V = AnalyticFn(GaussianTerm{3.0, 40.0, 0.4});
  for (auto _ : state)
    benchmark::DoNotOptimize(cyl::partial_dn(cw, V, 0.7, cyl::Component::Gamma0, cyl::Component::Gamma1, 12));
}
BENCHMARK(BM_DnBlocks)->Unit(benchmark::kMillisecond);

static void BM_PlanarFactorize(benchmark::State& state) {
  const std::size_t nx = std::size_t(state.range(0)), ny = std::size_t(state.range(1));
  const e2d::Grid2D g(nx, ny);
  const e2d::ConformalMetric2D m(3, AnalyticFn(PolynomialTerm{{1.0, 0.2}}), g);
  const auto V = e2d::SampledFn2D::constant(g, 0.0);
  for (auto _ : state) {
    e2d::DirichletSolver solver(e2d::assemble(m, V, 1.0));
    benchmark::DoNotOptimize(&solver);
  }
}
BENCHMARK(BM_PlanarFactorize)->Args({101, 64})->Args({201, 128})->Args({401, 256})->Unit(benchmark::kMillisecond);

static void BM_PlanarSolve(benchmark::State& state) {
  const std::size_t nx = std::size_t(state.range(0)), ny = std::size_t(state.range(1));
  const e2d::Grid2D g(nx, ny);
  const e2d::ConformalMetric2D m(3, AnalyticFn(PolynomialTerm{{1.0, 0.2}}), g);
  const e2d::DirichletSolver solver(e2d::assemble(m, e2d::SampledFn2D::constant(g, 0.0), 1.0));
  const auto boundary = e2d::SampledFn2D::from(g, [](double, double y) { return std::cos(3.0 * y); });
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(boundary.values()));
}
BENCHMARK(BM_PlanarSolve)->Args({201, 128})->Args({401, 256})->Unit(benchmark::kMillisecond);

static void BM_GaugeIteration(benchmark::State& state) {
  const e2d::Grid2D g(101, 64);
  const e2d::ConformalMetric2D m(3, AnalyticFn(PolynomialTerm{{1.0, 0.2}}), g);
  const auto eta = yamabe::eta_profile(g, 0.0, std::numbers::pi, 0.3, 0.5);
  const auto pb = yamabe::planar_problem(m, yamabe::Nonlinearity::Gauge, 1.0, e2d::SampledFn2D::constant(g, 0.0), eta);
  const auto b = yamabe::make_bracket(pb);
  for (auto _ : state) benchmark::DoNotOptimize(yamabe::monotone_iterate(pb, b));
}
BENCHMARK(BM_GaugeIteration)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
