#include <benchmark/benchmark.h>

#include "fracdeg/degree.hpp"
#include "fracdeg/jacobian.hpp"
#include "fracdeg/rng.hpp"
#include "fracdeg/seminorm.hpp"

using namespace fracdeg;

namespace {

const CantorMapSpec kSpec8 = CantorMapSpec::lusin_n(2, 0.5, 8);

void BM_MapEvaluate(benchmark::State& state) {
  PiecewiseRadialMap f(kSpec8);
  Rng rng(1);
  std::vector<Pt> points;
  for (int i = 0; i < 4096; ++i)
    points.push_back(Pt{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.eval(points[i++ & 4095]));
  }
}
BENCHMARK(BM_MapEvaluate);

void BM_MapDifferential(benchmark::State& state) {
  PiecewiseRadialMap f(kSpec8);
  Rng rng(2);
  std::vector<Pt> points;
  for (int i = 0; i < 4096; ++i)
    points.push_back(Pt{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
  size_t i = 0;
  for (auto _ : state) {
    try {
      benchmark::DoNotOptimize(f.analytic_differential(points[i++ & 4095]));
    } catch (const UndefinedDerivative&) {
    }
  }
}
BENCHMARK(BM_MapDifferential);

void BM_DegreeQuery(benchmark::State& state) {
  PiecewiseRadialMap f(kSpec8);
  static GridFunction g = GridFunction::sample(f, SupCube::unit(2), 256);
  static DegreeSolver solver(g, SupCube::unit(2));
  Rng rng(3);
  for (auto _ : state) {
    Pt y{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    try {
      benchmark::DoNotOptimize(solver.degree(y).value);
    } catch (const RefineGridError&) {
    }
  }
}
BENCHMARK(BM_DegreeQuery);

void BM_MollifiedJacobian(benchmark::State& state) {
  PiecewiseRadialMap f(kSpec8);
  Mollifier moll(f, 0.01);
  Rng rng(4);
  for (auto _ : state) {
    Pt x{rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)};
    benchmark::DoNotOptimize(moll.value_and_jacobian(x).jacobian);
  }
}
BENCHMARK(BM_MollifiedJacobian);

void BM_PairingSweep(benchmark::State& state) {
  PiecewiseRadialMap f(kSpec8);
  PairingOptions po;
  po.threads = static_cast<int>(state.range(0));
  std::vector<PairingWeight> w{[](const Pt&, const Pt&) { return 1.0; }};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        mollified_pairing_sweep(f, 0.02, SupCube::unit(2).box(), w, po)[0]);
  }
}
BENCHMARK(BM_PairingSweep)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_GagliardoPairs(benchmark::State& state) {
  PiecewiseRadialMap f(kSpec8);
  SeminormParams params;
  params.s = 0.3;
  params.p = 2.0;
  params.grid_n = static_cast<int>(state.range(0));
  params.refinements = 3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gagliardo_seminorm(f, SupCube::unit(2), params).value);
  }
}
BENCHMARK(BM_GagliardoPairs)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
