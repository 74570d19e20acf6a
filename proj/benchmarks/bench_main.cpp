#include <benchmark/benchmark.h>

#include <cmath>

#include "toric/catalog.hpp"
#include "toric/ding.hpp"
#include "toric/exp_integrals.hpp"
#include "toric/legendre.hpp"
#include "toric/soliton.hpp"
#include "toric/weighted_volume.hpp"

using namespace toric;

namespace {

const Polyhedron& hexagon() {
  static const Polyhedron p = anticanonical_polyhedron({{1, 0}, {1, 1}, {0, 1}, {-1, 0}, {-1, -1}, {0, -1}});
  return p;
}

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

static void BM_BrionHexagon(benchmark::State& state) {
  const ExpIntegrator ei(hexagon());
  const Eigen::VectorXd b = vec2(0.3, -0.7);
  for (auto _ : state) benchmark::DoNotOptimize(ei.brion(b));
}
BENCHMARK(BM_BrionHexagon);

static void BM_TriangulatedHexagon(benchmark::State& state) {
  const ExpIntegrator ei(hexagon());
  const Eigen::VectorXd b = vec2(0.3, -0.7);
  for (auto _ : state) benchmark::DoNotOptimize(ei.triangulated(b));
}
BENCHMARK(BM_TriangulatedHexagon);

static void BM_SolveBp(benchmark::State& state) {
  const char* names[] = {"cylinder", "o-minus-1", "gaussian-2d"};
  const Polyhedron& p = *catalog_entry(names[state.range(0)]).polyhedron;
  for (auto _ : state) benchmark::DoNotOptimize(solve_bp(p));
  state.SetLabel(names[state.range(0)]);
}
BENCHMARK(BM_SolveBp)->DenseRange(0, 2);

static void BM_IsDelzant(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(is_delzant(hexagon()));
}
BENCHMARK(BM_IsDelzant);

static void BM_Legendre1d(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PotentialGrid f = PotentialGrid::sample({{-3, 3, n}}, PotentialKind::Kahler, quadratic_potential(1));
  for (auto _ : state) benchmark::DoNotOptimize(legendre(f));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Legendre1d)->RangeMultiplier(4)->Range(256, 65536)->Complexity();

static void BM_Legendre2d(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PotentialGrid f =
      PotentialGrid::sample({{-2, 2, n}, {-2, 2, n}}, PotentialKind::Kahler, quadratic_potential(2));
  for (auto _ : state) benchmark::DoNotOptimize(legendre(f));
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_Legendre2d)->RangeMultiplier(2)->Range(32, 256)->Complexity();

static void BM_ResidualCylinder(benchmark::State& state) {
  const CatalogEntry& e = catalog_entry("cylinder");
  const PotentialGrid g = PotentialGrid::sample(e.u_box, PotentialKind::Symplectic, *e.u, e.polyhedron, false);
  for (auto _ : state) benchmark::DoNotOptimize(rho(g, *e.expected_b));
}
BENCHMARK(BM_ResidualCylinder)->Unit(benchmark::kMillisecond);

static void BM_DingCp1(benchmark::State& state) {
  const CatalogEntry& e = catalog_entry("cp1");
  const WeightA a = WeightA::linear(*e.polyhedron, *e.expected_b);
  for (auto _ : state) benchmark::DoNotOptimize(ding(*e.u, a));
}
BENCHMARK(BM_DingCp1)->Unit(benchmark::kMillisecond);

static void BM_FutakiProfile(benchmark::State& state) {
  const FutakiParams p{2, 3.0, solve_futaki_mu(2, 3.0)};
  for (auto _ : state) benchmark::DoNotOptimize(futaki_profile(p));
}
BENCHMARK(BM_FutakiProfile);

// The packaged benchmark_main archive carries LTO bytecode from another
// compiler release, so the entry point lives here.
BENCHMARK_MAIN();
