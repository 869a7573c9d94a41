#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>

#include "commands.hpp"
#include "structsvm/error.hpp"
#include "structsvm/hierarchy.hpp"
#include "structsvm/hull_search.hpp"
#include "structsvm/search.hpp"
#include "structsvm/synthetic.hpp"

namespace structsvm::cli {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<LabelPoint> random_points(std::mt19937_64& rng, int n, double hlo, double hhi, double glo, double ghi) {
  std::uniform_real_distribution<double> uh(hlo, hhi), ug(glo, ghi);
  std::vector<LabelPoint> pts;
  for (int i = 0; i < n; ++i) pts.push_back({static_cast<LabelId>(i), uh(rng), ug(rng)});
  return pts;
}

ChainInstance random_chain(std::mt19937_64& rng, int length, int states) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_int_distribution<int> s(0, states - 1);
  ChainInstance c;
  c.length = length;
  c.num_states = states;
  c.unary.resize(static_cast<std::size_t>(length * states));
  c.pairwise.assign(static_cast<std::size_t>(length * states * states), 0.0);
  for (auto& v : c.unary) v = nd(rng);
  for (std::size_t i = static_cast<std::size_t>(states * states); i < c.pairwise.size(); ++i) c.pairwise[i] = nd(rng);
  for (int p = 0; p < length; ++p) c.true_label.push_back(s(rng));
  return c;
}

double phi_star(const std::vector<LabelPoint>& pts) {
  double best = 0.0;
  for (const auto& p : pts)
    if (p.h > 0 && p.g > 0) best = std::max(best, p.h * p.g);
  return best;
}

// ---------------------------------------------------------------- compare-oracles

struct Run {
  double value = 0.0;
  int queries = 0;
  double ms = 0.0;
};

struct Row {
  double queries = 0.0, ms = 0.0;
  int fails = 0;
};

template <class F>
Run timed(F&& f) {
  const auto t0 = Clock::now();
  Run r = f();
  r.ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  return r;
}

// Every method maximizes Phi = h*g over the same labels. The hull search works on psi = (h'+1)g with
// h' = h - 1 and recovers an integral label afterwards; only its search calls are counted.
std::map<std::string, Run> run_methods(const std::vector<LabelPoint>& pts) {
  const EnumerationOracle o(pts);
  std::map<std::string, Run> runs;
  runs["binary"] = timed([&] {
    const auto r = binary_search_sgd(o, 1e-2, 1e2);
    return Run{r.best_value, r.oracle_calls, 0};
  });
  runs["bisecting"] = timed([&] {
    const auto r = bisecting_search(o, 1.0, 60);
    return Run{r.best_value, r.oracle_calls, 0};
  });
  runs["angular"] = timed([&] {
    const auto r = angular_search(o, 1.0, 2 * static_cast<int>(pts.size()) + 1);
    return Run{r.best_value, r.oracle_calls, 0};
  });
  runs["hull"] = timed([&] {
    std::vector<LabelPoint> shifted = pts;
    for (auto& p : shifted) p.h -= 1.0;
    const EnumerationOracle so(shifted);
    const auto loss = BiCriteriaLoss::slack();
    const auto r = convex_hull_search(so, loss);
    const LabelPoint y = integral_recovery(r.label, so, loss);
    const double phi = (y.h + 1.0) > 0 && y.g > 0 ? (y.h + 1.0) * y.g : 0.0;
    return Run{phi, r.oracle_calls, 0};
  });
  runs["brute"] = timed([&] { return Run{phi_star(pts), static_cast<int>(pts.size()), 0}; });
  return runs;
}

// ---------------------------------------------------------------- theory-check

struct Verdict {
  bool ok;
  std::string detail;
};

Verdict suite_monotonicity(int iters, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ul(0.01, 10.0);
  long long bad = 0;
  for (int trial = 0; trial < iters; ++trial) {
    const auto inst = random_chain(rng, 1 + trial % 8, 2 + trial % 2);
    const ChainOracle o(inst);
    std::vector<double> lams;
    for (int i = 0; i < 20; ++i) lams.push_back(ul(rng));
    std::sort(lams.begin(), lams.end());
    for (std::size_t i = 1; i < lams.size(); ++i) {
      const auto a = o.query(lams[i - 1]), b = o.query(lams[i]);
      bad += a.point.g > b.point.g || a.point.h < b.point.h;
    }
  }
  return {bad == 0, std::to_string(iters) + " chains x 20 lambdas, " + std::to_string(bad) + " violations"};
}

Verdict suite_k_bound(int iters, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ul(0.01, 10.0);
  long long bad = 0;
  for (int trial = 0; trial < iters; ++trial) {
    const auto pts = random_points(rng, 50, -1, 3, 0, 4);
    const EnumerationOracle o(pts);
    const double star = phi_star(pts);
    for (int i = 0; i < 20; ++i) {
      const double lam = ul(rng);
      bad += suboptimality_certificate(o.query(lam).oracle_value, lam) < star - 1e-12;
    }
  }
  return {bad == 0, std::to_string(iters) + " instances x 20 lambdas, " + std::to_string(bad) + " violations"};
}

Verdict suite_angular_subopt(int iters, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ul(0.2, 5.0);
  long long bad = 0, checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto pts = random_points(rng, 100, 0.05, 3, 0.05, 4);
    const EnumerationOracle o(pts);
    const double lam0 = ul(rng);
    const auto r = angular_search(o, lam0, iters);
    const auto first = o.query_constrained(lam0, {kLambdaInf, 0.0, true});
    if (!first) continue;
    const double d = first->point.g / first->point.h;
    const double v1 = std::max(lam0 * d, 1.0 / (lam0 * d));
    const double star = phi_star(pts);
    for (std::size_t t = 1; t <= r.trace.size(); ++t) {
      ++checked;
      bad += star / r.trace[t - 1] > std::pow(v1, 4.0 / (static_cast<double>(t) + 1.0)) * (1 + 1e-12);
    }
  }
  return {bad == 0, "50 instances, " + std::to_string(iters) + " iterations max, " + std::to_string(checked) +
                        " checks, " + std::to_string(bad) + " violations"};
}

Verdict suite_hull_calls(int iters, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  long long bad = 0;
  const std::vector<BiCriteriaLoss> losses = {BiCriteriaLoss::slack(), BiCriteriaLoss::probloss(),
                                              BiCriteriaLoss::beta_scaling(0.5)};
  for (int trial = 0; trial < iters; ++trial) {
    const auto pts = random_points(rng, 40, -1, 3, 0, 4);
    const auto bound = static_cast<int>(upper_right_hull(pts).size()) + 1;
    for (const auto& loss : losses) bad += convex_hull_search(EnumerationOracle(pts), loss).oracle_calls > bound;
    const int m = 4 + 2 * (trial % 3);
    const ChainOracle chain(random_chain(rng, m, 2));
    for (const auto& loss : losses) bad += convex_hull_search(chain, loss).oracle_calls > m + 2;
  }
  return {bad == 0, std::to_string(iters) + " point sets and chains, " + std::to_string(bad) + " violations"};
}

Verdict suite_alpha_optimality(int iters, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  long long bad = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int M = 3 + trial % 20;
    std::vector<std::pair<int, int>> edges;
    std::vector<int> parent(static_cast<std::size_t>(M), -1);
    for (int i = 1; i < M; ++i) {
      parent[static_cast<std::size_t>(i)] = std::uniform_int_distribution<int>(0, i - 1)(rng);
      edges.emplace_back(parent[static_cast<std::size_t>(i)], i);
    }
    const auto spec = HierarchySpec::from_edges(M, edges);
    std::vector<double> norms(static_cast<std::size_t>(M));
    for (auto& v : norms) v = 3.0 * u(rng);
    const double best = alpha_objective(norms, argmin_alpha_tree(norms, spec));
    for (int k = 0; k < iters; ++k) {
      std::vector<double> a(static_cast<std::size_t>(M));
      for (auto& v : a) v = u(rng) + 1e-9;
      double worst = 0.0;
      for (int l : spec.leaves()) {
        double s = 0.0;
        for (int n : spec.closure(l)) s += a[static_cast<std::size_t>(n)];
        worst = std::max(worst, s);
      }
      for (auto& v : a) v /= worst;
      bad += alpha_objective(norms, a) < best * (1 - 1e-12);
    }
  }
  return {bad == 0, "50 trees x " + std::to_string(iters) + " random feasible alphas, " + std::to_string(bad) +
                        " better than the solver"};
}

Verdict suite_invariance(int iters, std::uint64_t seed) {
  double worst = 1.0;
  for (int s = 0; s < iters; ++s) {
    HierGenParams p;
    p.num_examples = 600;
    p.feature_dim = 20;
    p.seed = seed + static_cast<std::uint64_t>(s);
    const auto syn = generate_unbalanced_hierarchy(p);
    HierDataset train, test;
    train.feature_dim = test.feature_dim = syn.data.feature_dim;
    for (std::size_t i = 0; i < syn.data.examples.size(); ++i)
      (i < 400 ? train : test).examples.push_back(syn.data.examples[i]);
    const auto dup = duplicate_node(syn.spec, 1);
    HierTrainConfig cfg;
    cfg.rho = 1.01;
    const auto a = train_hierarchical(train, syn.spec, HierMethod::NHSVM, cfg);
    const auto b = train_hierarchical(train, dup, HierMethod::NHSVM, cfg);
    int agree = 0;
    for (const auto& ex : test.examples) agree += predict_leaf(a.model, syn.spec, ex.x) == predict_leaf(b.model, dup, ex.x);
    worst = std::min(worst, static_cast<double>(agree) / static_cast<double>(test.examples.size()));
  }
  return {worst >= 0.98, std::to_string(iters) + " seeds, worst agreement " + std::to_string(worst)};
}

}  // namespace

int cmd_compare_oracles(const CompareOptions& o) {
  std::mt19937_64 rng(o.seed);
  const std::vector<std::string> order = {"binary", "bisecting", "angular", "hull", "brute"};
  std::map<std::string, Row> rows;
  std::uniform_real_distribution<double> scale(0.5, 4.0);
  for (int i = 0; i < o.instances; ++i) {
    std::vector<LabelPoint> pts;
    if (o.stream == "random") {
      pts = random_points(rng, o.points, -1, 3, 0, 4);
    } else if (o.stream == "hard") {
      pts = three_label_hard_instance(scale(rng), scale(rng), 0.01).points();
    } else {
      pts = ChainOracle(random_chain(rng, o.length, 2), 1.0).enumerate().points();
    }
    const auto runs = run_methods(pts);
    double best = 0.0;
    for (const auto& [name, r] : runs) best = std::max(best, r.value);
    for (const auto& [name, r] : runs) {
      Row& row = rows[name];
      row.queries += r.queries;
      row.ms += r.ms;
      row.fails += r.value < best - 1e-9;
    }
  }
  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) throw Error(ErrorCode::Io, "cannot write '" + o.out + "'");
  }
  std::ostream& os = o.out.empty() ? std::cout : file;
  os << "method,avg_queries,avg_time_ms,fail_max_rate\n";
  const double n = static_cast<double>(o.instances);
  for (const auto& name : order) {
    const Row& r = rows[name];
    char line[256];
    std::snprintf(line, sizeof line, "%s,%.6g,%.6g,%.6g\n", name.c_str(), r.queries / n, r.ms / n, r.fails / n);
    os << line;
  }
  return kOk;
}

int cmd_theory_check(const TheoryOptions& o) {
  struct Suite {
    const char* name;
    int default_iters;
    std::function<Verdict(int, std::uint64_t)> run;
  };
  const Suite suites[] = {
      {"monotonicity", 200, suite_monotonicity},       {"k-bound", 200, suite_k_bound},
      {"angular-subopt", 63, suite_angular_subopt},    {"hull-calls", 100, suite_hull_calls},
      {"alpha-optimality", 2000, suite_alpha_optimality}, {"invariance", 3, suite_invariance},
  };
  bool known = o.suite == "all";
  for (const auto& s : suites) known = known || o.suite == s.name;
  if (!known) {
    std::fprintf(stderr, "error: unknown suite '%s'\n", o.suite.c_str());
    return kUsage;
  }
  bool all_ok = true;
  for (const auto& s : suites) {
    if (o.suite != "all" && o.suite != s.name) continue;
    const int iters = o.iters > 0 ? o.iters : s.default_iters;
    const auto t0 = Clock::now();
    const Verdict v = s.run(iters, o.seed);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("%s %-17s %7.3f s  %s\n", v.ok ? "PASS" : "FAIL", s.name, secs, v.detail.c_str());
    all_ok = all_ok && v.ok;
  }
  return all_ok ? kOk : kFailure;
}

}  // namespace structsvm::cli
