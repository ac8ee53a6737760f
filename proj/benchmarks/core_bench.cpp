#include <benchmark/benchmark.h>

#include <random>

#include "regls/experiment.hpp"

using namespace regls;

namespace {

UnstructuredProblem bench_problem(int m, int n) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  UnstructuredProblem p;
  p.a = Matrix(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) p.a(i, j) = gauss(rng);
  }
  p.a /= p.a.norm();
  p.y = Vector(m);
  for (int i = 0; i < m; ++i) p.y(i) = gauss(rng);
  p.y /= p.y.norm();
  p.rho_h = 0.4;
  p.rho_y = 0.4;
  return p;
}

void BM_Pinv(benchmark::State& state) {
  const UnstructuredProblem p = bench_problem(
      static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pinv(p.a));
  }
}
BENCHMARK(BM_Pinv)->Args({5, 3})->Args({8, 5})->Args({40, 20});

void BM_GradientExpansion(benchmark::State& state) {
  const UnstructuredProblem p = bench_problem(
      static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(expand_ls_regret(p.a, p.y));
  }
}
BENCHMARK(BM_GradientExpansion)->Args({5, 3})->Args({8, 5});

void BM_BuildUnstructuredLmi(benchmark::State& state) {
  const UnstructuredProblem p = bench_problem(
      static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_unstructured_lmi(p));
  }
}
BENCHMARK(BM_BuildUnstructuredLmi)->Args({5, 3})->Args({8, 5});

void BM_ClsSolve(benchmark::State& state) {
  const UnstructuredProblem p = bench_problem(
      static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cls_solve(p));
  }
}
BENCHMARK(BM_ClsSolve)->Args({5, 3})->Args({8, 5});

void BM_WorstCaseUb(benchmark::State& state) {
  const UnstructuredProblem p = bench_problem(5, 3);
  const Vector x = pinv(p.a) * p.y;
  for (auto _ : state) {
    benchmark::DoNotOptimize(worst_case_ub(p, x));
  }
}
BENCHMARK(BM_WorstCaseUb);

void BM_TrialErrorEvaluation(benchmark::State& state) {
  const UnstructuredProblem p = bench_problem(5, 3);
  const Vector x = pinv(p.a) * p.y;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const PerturbationSample s = sample_unstructured(
        5, 3, p.rho_h, p.rho_y, SampleMode::kUniform, seed++);
    benchmark::DoNotOptimize(
        ((p.a + s.delta_a) * x - (p.y + s.delta_y)).squaredNorm());
  }
}
BENCHMARK(BM_TrialErrorEvaluation);

}  // namespace

BENCHMARK_MAIN();
