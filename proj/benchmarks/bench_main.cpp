#include "isoflow/fixtures.hpp"
#include "isoflow/flows.hpp"
#include "isoflow/integrate.hpp"
#include "isoflow/parsum.hpp"
#include "isoflow/random.hpp"

#include <benchmark/benchmark.h>

using namespace isoflow;

namespace {

SymMatrix tri_input(int n) {
  Rng rng(17);
  return random_in_pattern(rng, SparsityPattern::tridiagonal(n));
}

void BM_ZeroFlowField(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SymMatrix X = tri_input(n);
  const SymMatrix D = SymMatrix::ramp(n);
  const SparsityPattern p = SparsityPattern::tridiagonal(n);
  for (auto _ : state) benchmark::DoNotOptimize(zero_flow_field(X, D, p));
}
BENCHMARK(BM_ZeroFlowField)->Arg(6)->Arg(10)->Arg(16);

void BM_DoubleBracketField(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SymMatrix X = tri_input(n);
  const SymMatrix D = SymMatrix::ramp(n);
  for (auto _ : state) benchmark::DoNotOptimize(double_bracket_field(X, D));
}
BENCHMARK(BM_DoubleBracketField)->Arg(6)->Arg(10)->Arg(16);

void BM_PseudoInverse(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  Rng rng(5);
  const Matrix A = random_psd(rng, N, N / 2);
  for (auto _ : state) benchmark::DoNotOptimize(psd_pseudo_inverse(A));
}
BENCHMARK(BM_PseudoInverse)->Arg(21)->Arg(55);

void BM_ParallelSum(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  Rng rng(9);
  const Matrix A = random_psd(rng, N, 2 * N / 3);
  const Matrix B = random_psd(rng, N, 2 * N / 3);
  for (auto _ : state) benchmark::DoNotOptimize(parallel_sum(A, B));
}
BENCHMARK(BM_ParallelSum)->Arg(21)->Arg(55);

void BM_IntegrateExample1(benchmark::State& state) {
  const FlowProblem p = FlowProblem::make(state.range(0) ? FlowKind::double_bracket : FlowKind::zero,
                                          fixture("example1").X0);
  IntegratorConfig cfg;
  cfg.t_final = 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(rk45_integrate(make_field(p), p.X0, cfg).final_state);
}
BENCHMARK(BM_IntegrateExample1)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
