#include <benchmark/benchmark.h>

#include <random>

#include "structsvm/hull_search.hpp"
#include "structsvm/oracle.hpp"
#include "structsvm/search.hpp"

using namespace structsvm;

namespace {

ChainInstance random_chain(int length, int states, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  ChainInstance c;
  c.length = length;
  c.num_states = states;
  c.unary.resize(static_cast<std::size_t>(length * states));
  c.pairwise.assign(static_cast<std::size_t>(length * states * states), 0.0);
  for (auto& v : c.unary) v = n(rng);
  for (std::size_t i = static_cast<std::size_t>(states * states); i < c.pairwise.size(); ++i) c.pairwise[i] = n(rng);
  for (int p = 0; p < length; ++p) c.true_label.push_back(static_cast<int>(rng() % static_cast<unsigned>(states)));
  return c;
}

void BM_ChainOracle(benchmark::State& st) {
  const ChainOracle o(random_chain(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)), 1), 1.0);
  double lam = 0.5;
  for (auto _ : st) {
    benchmark::DoNotOptimize(o.query(lam));
    lam = lam < 4 ? lam * 1.1 : 0.5;
  }
}
BENCHMARK(BM_ChainOracle)->Args({10, 4})->Args({50, 2})->Args({16, 12});

void BM_KBestViterbi(benchmark::State& st) {
  const ChainOracle o(random_chain(20, 8, 2), 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(o.k_best(1.0, static_cast<std::size_t>(st.range(0))));
}
BENCHMARK(BM_KBestViterbi)->Arg(1)->Arg(10)->Arg(100);

void BM_BinarySearch(benchmark::State& st) {
  const ChainOracle o(random_chain(20, 5, 3), 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(binary_search_sgd(o, 1e-3, 1e3));
}
BENCHMARK(BM_BinarySearch);

void BM_BisectingSearch(benchmark::State& st) {
  const ChainOracle o(random_chain(20, 5, 3), 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(bisecting_search(o, 1.0));
}
BENCHMARK(BM_BisectingSearch);

void BM_AngularSearch(benchmark::State& st) {
  // Slope-window queries need the enumerated label space.
  const auto o = ChainOracle(random_chain(6, 4, 3), 1.0).enumerate();
  for (auto _ : st) benchmark::DoNotOptimize(angular_search(o, 1.0, static_cast<int>(st.range(0))));
}
BENCHMARK(BM_AngularSearch)->Arg(8)->Arg(63);

void BM_HullSearch(benchmark::State& st) {
  const ChainOracle o(random_chain(static_cast<int>(st.range(0)), 5, 4), 1.0);
  const auto loss = BiCriteriaLoss::slack();
  for (auto _ : st) benchmark::DoNotOptimize(convex_hull_search(o, loss));
}
BENCHMARK(BM_HullSearch)->Arg(10)->Arg(25);

void BM_HullSearchWithRecovery(benchmark::State& st) {
  const ChainOracle o(random_chain(20, 5, 5), 1.0);
  const auto loss = BiCriteriaLoss::probloss();
  for (auto _ : st) {
    const auto r = convex_hull_search(o, loss);
    benchmark::DoNotOptimize(integral_recovery(r.label, o, loss));
  }
}
BENCHMARK(BM_HullSearchWithRecovery);

}  // namespace
