#include <benchmark/benchmark.h>

#include "../tests/oracles.hpp"
#include "plectic/harmonize.hpp"

using namespace plectic;

namespace {

const u64 P = 3;

FiniteCochain random_cochain(int m) {
  FiniteCochain c(P, m);
  for (auto& x : c.data()) x = testutil::uniform(-1000, 1000);
  return c;
}

IntegrandSpec random_spec() { return {oracles::random_log_factor(P), oracles::random_log_factor(P)}; }

void BM_integral_serial(benchmark::State& st) {
  int m = static_cast<int>(st.range(0));
  FiniteCochain c = random_cochain(m);
  IntegrandSpec s = random_spec();
  for (auto _ : st) benchmark::DoNotOptimize(riemann_log_integral_serial(c, s, m));
}

void BM_integral_parallel(benchmark::State& st) {
  int m = static_cast<int>(st.range(0));
  FiniteCochain c = random_cochain(m);
  IntegrandSpec s = random_spec();
  for (auto _ : st) benchmark::DoNotOptimize(riemann_log_integral(c, s, m, static_cast<int>(st.range(1))));
}

std::vector<SyntheticCocycle::Dirac> diracs() {
  std::vector<SyntheticCocycle::Dirac> M;
  for (int i = 0; i < 3; ++i)
    M.push_back({oracles::random_point(P), oracles::random_point(P), oracles::random_point(P), oracles::random_point(P), 1});
  return M;
}

void BM_harmonize(benchmark::State& st) {
  int m = static_cast<int>(st.range(0));
  SyntheticCocycle c(P, diracs(), random_cochain(m));
  for (auto _ : st) {
    Harmonizer H(c, m, ppow(P, 7), static_cast<int>(st.range(1)));
    benchmark::DoNotOptimize(H.D());
  }
}

void BM_solve_sparse(benchmark::State& st) {
  int m = static_cast<int>(st.range(0));
  ModSystem s = lift_system(degenerations_of(random_cochain(m).reduced(ppow(P, 7))));
  for (auto _ : st) benchmark::DoNotOptimize(solve_sparse(s));
  st.counters["unknowns"] = static_cast<double>(s.cols);
}

void BM_solve_dense(benchmark::State& st) {
  int m = static_cast<int>(st.range(0));
  ModSystem s = lift_system(degenerations_of(random_cochain(m).reduced(ppow(P, 7))));
  for (auto _ : st) benchmark::DoNotOptimize(solve_dense(s));
  st.counters["unknowns"] = static_cast<double>(s.cols);
}

}  // namespace

BENCHMARK(BM_integral_serial)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_integral_parallel)->ArgsProduct({{3, 4}, {1, 2, 4, 8}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_harmonize)->ArgsProduct({{2, 3}, {1, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_solve_sparse)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_solve_dense)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
