#include <benchmark/benchmark.h>

#include <random>

#include "structsvm/hierarchy.hpp"

using namespace structsvm;

namespace {

HierarchySpec random_tree(int nodes, std::mt19937_64& rng) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i < nodes; ++i) edges.emplace_back(static_cast<int>(rng() % static_cast<unsigned>(i)), i);
  return HierarchySpec::from_edges(nodes, edges);
}

void BM_ArgminAlphaTree(benchmark::State& st) {
  std::mt19937_64 rng(7);
  const auto spec = random_tree(static_cast<int>(st.range(0)), rng);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  NodeWeightNorms norms(static_cast<std::size_t>(spec.num_nodes()));
  for (auto& v : norms) v = u(rng);
  for (auto _ : st) benchmark::DoNotOptimize(argmin_alpha_tree(norms, spec));
}
BENCHMARK(BM_ArgminAlphaTree)->Arg(15)->Arg(127)->Arg(1023);

void BM_AlphaRho(benchmark::State& st) {
  std::mt19937_64 rng(8);
  const auto spec = random_tree(static_cast<int>(st.range(0)), rng);
  for (auto _ : st) benchmark::DoNotOptimize(compute_alpha_rho(spec, 2.0));
}
BENCHMARK(BM_AlphaRho)->Arg(15)->Arg(127)->Arg(1023);

void BM_TreeArgmax(benchmark::State& st) {
  std::mt19937_64 rng(9);
  const auto spec = random_tree(static_cast<int>(st.range(0)), rng);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> scores(static_cast<std::size_t>(spec.num_nodes()));
  for (auto& v : scores) v = n(rng);
  const std::vector<int> truth = {spec.leaves().front()};
  for (auto _ : st) benchmark::DoNotOptimize(tree_multilabel_argmax(spec, scores, spec.closure(truth.front())));
}
BENCHMARK(BM_TreeArgmax)->Arg(15)->Arg(127)->Arg(1023);

}  // namespace
