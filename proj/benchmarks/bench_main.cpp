#include <benchmark/benchmark.h>

#include "parisi/functional.hpp"
#include "parisi/gamma.hpp"
#include "parisi/parisi_pde.hpp"
#include "parisi/spherical.hpp"

using namespace parisi;

namespace {

const Mixture kSK = Mixture::pure(2, 0.64);

RSBMeasure measure_with_k(int k) {
  std::vector<double> m{0.0}, q{0.0};
  for (int i = 1; i <= k; ++i) m.push_back(static_cast<double>(i) / (k + 1));
  m.push_back(1.0);
  for (int i = 0; i <= k; ++i) q.push_back(0.1 + 0.6 * i / std::max(k, 1));
  q.push_back(1.0);
  return RSBMeasure::make(k, m, q);
}

void BM_SolvePde(benchmark::State& st) {
  const auto mu = measure_with_k(static_cast<int>(st.range(0)));
  const auto g = GridParams::defaults(kSK);
  for (auto _ : st) benchmark::DoNotOptimize(solve_pde(kSK, mu, g));
}
BENCHMARK(BM_SolvePde)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_ParisiValue(benchmark::State& st) {
  const auto mu = measure_with_k(static_cast<int>(st.range(0)));
  auto g = GridParams::defaults(kSK);
  g.n_u = 0;
  for (auto _ : st) benchmark::DoNotOptimize(parisi_value(kSK, mu, g));
}
BENCHMARK(BM_ParisiValue)->Arg(1)->Arg(3)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_RecursionOracle(benchmark::State& st) {
  const auto mu = measure_with_k(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(recursion_oracle(kSK, mu));
}
BENCHMARK(BM_RecursionOracle)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_GammaReport(benchmark::State& st) {
  const auto mu = measure_with_k(2);
  std::vector<double> us;
  for (int i = 0; i <= 20; ++i) us.push_back(i / 20.0);
  for (auto _ : st) benchmark::DoNotOptimize(gamma_report(kSK, mu, us));
}
BENCHMARK(BM_GammaReport)->Unit(benchmark::kMillisecond);

void BM_TwoPlusP(benchmark::State& st) {
  for (auto _ : st) {
    const auto s = solve_two_plus_p(1.0, 0.05, 4);
    benchmark::DoNotOptimize(spherical_certify(s.mixture, s.measure));
  }
}
BENCHMARK(BM_TwoPlusP)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
