#include "structsvm/hierarchy.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "structsvm/error.hpp"

namespace structsvm {

namespace {

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void check_alpha(const HierarchySpec& spec, const AlphaWeights& alpha) {
  if (static_cast<int>(alpha.size()) != spec.num_nodes())
    throw Error(ErrorCode::LengthMismatch, "alpha has " + std::to_string(alpha.size()) + " entries, hierarchy has " +
                                               std::to_string(spec.num_nodes()) + " nodes");
}

void check_label(const HierarchySpec& spec, const std::vector<int>& y) {
  if (!spec.is_valid_label(y)) throw Error(ErrorCode::InvalidLabel, "label is not a union of root-to-leaf paths");
}

}  // namespace

// ---------------------------------------------------------------- HierarchySpec

HierarchySpec HierarchySpec::from_edges(int num_nodes, const std::vector<std::pair<int, int>>& edges) {
  if (num_nodes <= 0) throw Error(ErrorCode::InvalidParams, "hierarchy needs at least one node");
  HierarchySpec s;
  const auto M = static_cast<std::size_t>(num_nodes);
  s.parents_.assign(M, {});
  s.children_.assign(M, {});
  for (const auto& [p, c] : edges) {
    if (p < 0 || c < 0 || p >= num_nodes || c >= num_nodes)
      throw Error(ErrorCode::InvalidNode, "edge (" + std::to_string(p) + ", " + std::to_string(c) + ") out of range");
    if (p == c) throw Error(ErrorCode::InvalidParams, "self loop at node " + std::to_string(p));
    s.parents_[static_cast<std::size_t>(c)].push_back(p);
    s.children_[static_cast<std::size_t>(p)].push_back(c);
  }
  for (std::size_t n = 0; n < M; ++n) {
    s.parents_[n] = sorted_unique(s.parents_[n]);
    s.children_[n] = sorted_unique(s.children_[n]);
    if (s.parents_[n].size() > 1) s.is_tree_ = false;
    if (s.parents_[n].empty()) s.roots_.push_back(static_cast<int>(n));
    if (s.children_[n].empty()) s.leaves_.push_back(static_cast<int>(n));
  }
  // Kahn's algorithm, smallest ready id first.
  std::vector<int> indeg(M);
  std::set<int> ready;
  for (std::size_t n = 0; n < M; ++n) {
    indeg[n] = static_cast<int>(s.parents_[n].size());
    if (indeg[n] == 0) ready.insert(static_cast<int>(n));
  }
  while (!ready.empty()) {
    const int n = *ready.begin();
    ready.erase(ready.begin());
    s.topo_.push_back(n);
    for (int c : s.children_[static_cast<std::size_t>(n)])
      if (--indeg[static_cast<std::size_t>(c)] == 0) ready.insert(c);
  }
  if (s.topo_.size() != M) throw Error(ErrorCode::InvalidParams, "hierarchy contains a cycle");
  s.closure_.assign(M, {});
  for (int n : s.topo_) {
    auto& cl = s.closure_[static_cast<std::size_t>(n)];
    cl.push_back(n);
    for (int p : s.parents_[static_cast<std::size_t>(n)]) {
      const auto& pc = s.closure_[static_cast<std::size_t>(p)];
      cl.insert(cl.end(), pc.begin(), pc.end());
    }
    cl = sorted_unique(cl);
  }
  return s;
}

HierarchySpec HierarchySpec::read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::vector<std::pair<int, int>> edges;
  int declared = 0, max_id = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "#nodes") {
      if (!(ls >> declared) || declared <= 0) throw Error(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": bad #nodes");
      continue;
    }
    if (first[0] == '#') continue;
    int p = 0, c = 0;
    std::istringstream es(line);
    if (!(es >> p >> c)) throw Error(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": expected 'parent child'");
    edges.emplace_back(p, c);
    max_id = std::max({max_id, p, c});
  }
  const int m = std::max(declared, max_id + 1);
  if (m <= 0) throw Error(ErrorCode::Parse, path + ": empty hierarchy");
  return from_edges(m, edges);
}

void HierarchySpec::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << "#nodes " << num_nodes() << "\n";
  for (const auto& [p, c] : edges()) out << p << " " << c << "\n";
}

std::vector<std::pair<int, int>> HierarchySpec::edges() const {
  std::vector<std::pair<int, int>> e;
  for (int p = 0; p < num_nodes(); ++p)
    for (int c : children(p)) e.emplace_back(p, c);
  return e;
}

bool HierarchySpec::is_valid_label(const std::vector<int>& nodes) const {
  if (nodes.empty()) return false;
  std::vector<char> in(static_cast<std::size_t>(num_nodes()), 0);
  for (int n : nodes) {
    if (n < 0 || n >= num_nodes()) return false;
    in[static_cast<std::size_t>(n)] = 1;
  }
  for (int n : nodes) {
    for (int p : parents(n))
      if (!in[static_cast<std::size_t>(p)]) return false;
    if (!is_leaf(n)) {
      bool any = false;
      for (int c : children(n)) any = any || in[static_cast<std::size_t>(c)];
      if (!any) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- alpha programs

AlphaWeights compute_alpha_rho(const HierarchySpec& spec, double rho, std::optional<double> relaxed_T) {
  if (!(rho > 1.0) || !std::isfinite(rho)) throw Error(ErrorCode::InvalidParams, "rho must be > 1");
  if (!spec.is_tree() && !relaxed_T) relaxed_T = 1.5;
  // Relaxed ranges and DAGs: dual coordinate ascent, one multiplier per leaf.
  if (relaxed_T && !(*relaxed_T >= 1.0)) throw Error(ErrorCode::InvalidParams, "relaxed upper bound must be >= 1");

  const int M = spec.num_nodes();
  const auto& leaves = spec.leaves();
  const double expo = 1.0 / (rho - 1.0);

  if (!relaxed_T) {
    // Trees: a subtree with path budget b costs c_n * b^rho. The node keeps the share
    // s = k / (1 + k), k = C^(1/(rho-1)), C = sum of child costs; computed in log space.
    std::vector<double> cost(static_cast<std::size_t>(M), 1.0), share(static_cast<std::size_t>(M), 1.0);
    const auto& order = spec.topo_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const auto n = static_cast<std::size_t>(*it);
      if (spec.is_leaf(*it)) continue;
      double C = 0.0;
      for (int c : spec.children(*it)) C += cost[static_cast<std::size_t>(c)];
      const double logk = std::log(C) * expo;
      const double sh = 1.0 / (1.0 + std::exp(-logk));
      const double rest = 1.0 / (1.0 + std::exp(logk));
      share[n] = sh;
      cost[n] = std::pow(sh, rho) + C * std::pow(rest, rho);
    }
    AlphaWeights alpha(static_cast<std::size_t>(M), 0.0);
    std::vector<double> budget(static_cast<std::size_t>(M), 1.0);
    for (int n : order) {
      const auto un = static_cast<std::size_t>(n);
      const double avail = spec.parents(n).empty() ? 1.0 : budget[static_cast<std::size_t>(spec.parents(n)[0])];
      alpha[un] = avail * share[un];
      budget[un] = avail - alpha[un];
    }
    return alpha;
  }
  auto alpha_of = [&](double s) { return s > 0.0 ? std::pow(s / rho, expo) : 0.0; };

  // s_n sums the multipliers of leaves below n.
  std::vector<double> mult(leaves.size(), 0.0), s(static_cast<std::size_t>(M), 0.0);
  auto path_sum = [&](const std::vector<int>& path, double delta) {
    double t = 0.0;
    for (int n : path) t += alpha_of(s[static_cast<std::size_t>(n)] + delta);
    return t;
  };
  auto solve = [&](const std::vector<int>& path, double target) {
    double lo = 0.0;
    for (int n : path) lo = std::min(lo, -s[static_cast<std::size_t>(n)]);
    double hi = 1.0;
    while (path_sum(path, hi) < target) hi *= 2.0;
    lo = std::min(lo, hi);
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (path_sum(path, mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };

  auto kkt_violation = [&](std::size_t i) {
    const double p = path_sum(spec.closure(leaves[i]), 0.0);
    if (!relaxed_T) return std::abs(p - 1.0);
    double v = std::max({0.0, 1.0 - p, p - *relaxed_T});
    if (mult[i] > 0.0) v = std::max(v, std::abs(p - 1.0));
    if (mult[i] < 0.0) v = std::max(v, std::abs(p - *relaxed_T));
    return v;
  };
  for (int sweep = 0; sweep < 20000; ++sweep) {
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      const auto& path = spec.closure(leaves[i]);
      for (int n : path) s[static_cast<std::size_t>(n)] -= mult[i];
      double m = 0.0;
      if (!relaxed_T) {
        m = solve(path, 1.0);
      } else {
        const double p0 = path_sum(path, 0.0);
        if (p0 < 1.0) m = solve(path, 1.0);
        else if (p0 > *relaxed_T) m = solve(path, *relaxed_T);
      }
      mult[i] = m;
      for (int n : path) s[static_cast<std::size_t>(n)] += m;
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < leaves.size(); ++i) worst = std::max(worst, kkt_violation(i));
    if (worst < 1e-12) break;
  }
  AlphaWeights alpha(static_cast<std::size_t>(M));
  for (int n = 0; n < M; ++n) alpha[static_cast<std::size_t>(n)] = alpha_of(s[static_cast<std::size_t>(n)]);
  return alpha;
}

AlphaWeights compute_alpha_maxmin(const HierarchySpec& spec, bool directional) {
  if (!spec.is_tree()) throw Error(ErrorCode::UnsupportedDAG, "max-min alpha weights need a tree");
  // Bisection on the common floor m: internal nodes get m, leaves take the remainder of their path.
  auto feasible = [&](double m) {
    for (int l : spec.leaves()) {
      const double rest = 1.0 - m * static_cast<double>(spec.closure(l).size() - 1);
      if (rest < m) return false;
    }
    return true;
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (feasible(mid) ? lo : hi) = mid;
  }
  // Snap to the exact optimum 1/(longest path) once the bracket contains it.
  std::size_t longest = 1;
  for (int l : spec.leaves()) longest = std::max(longest, spec.closure(l).size());
  const double exact = 1.0 / static_cast<double>(longest);
  const double m = (std::abs(exact - lo) <= 1e-12) ? exact : lo;

  AlphaWeights alpha(static_cast<std::size_t>(spec.num_nodes()), m);
  for (int l : spec.leaves())
    alpha[static_cast<std::size_t>(l)] = 1.0 - m * static_cast<double>(spec.closure(l).size() - 1);
  (void)directional;  // leaves never fall below the floor, so the ordering holds either way
  return alpha;
}

std::vector<std::pair<int, double>> normalized_attributes(const HierarchySpec& spec, const AlphaWeights& alpha,
                                                          const std::vector<int>& y) {
  check_alpha(spec, alpha);
  check_label(spec, y);
  std::vector<std::pair<int, double>> out;
  for (int n : sorted_unique(y)) out.emplace_back(n, std::sqrt(alpha[static_cast<std::size_t>(n)]));
  return out;
}

double normalized_error(const HierarchySpec& spec, const AlphaWeights& alpha, const std::vector<int>& y,
                        const std::vector<int>& y_prime) {
  check_alpha(spec, alpha);
  check_label(spec, y);
  check_label(spec, y_prime);
  const auto a = sorted_unique(y), b = sorted_unique(y_prime);
  std::vector<int> diff;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(diff));
  double s = 0.0;
  for (int n : diff) s += alpha[static_cast<std::size_t>(n)];
  return std::sqrt(s);
}

std::vector<int> tree_multilabel_argmax(const HierarchySpec& spec, const std::vector<double>& node_scores,
                                        const std::vector<int>& y_true) {
  if (!spec.is_tree()) throw Error(ErrorCode::NotATree, "multi-label argmax needs a tree");
  const auto M = static_cast<std::size_t>(spec.num_nodes());
  if (node_scores.size() != M) throw Error(ErrorCode::LengthMismatch, "node score count differs from node count");
  std::vector<char> truth(M, 0);
  for (int n : y_true) {
    if (n < 0 || static_cast<std::size_t>(n) >= M) throw Error(ErrorCode::InvalidNode, "truth node out of range");
    truth[static_cast<std::size_t>(n)] = 1;
  }
  std::vector<double> r(node_scores), best(M, 0.0);
  for (int l : spec.leaves()) r[static_cast<std::size_t>(l)] += truth[static_cast<std::size_t>(l)] ? -1.0 : 1.0;

  // best[n]: max value of a valid sub-label rooted at n, n included.
  auto combine = [&](const std::vector<int>& kids, std::vector<int>* chosen) {
    double pos = 0.0;
    int argmax = -1;
    for (int c : kids) {
      const double b = best[static_cast<std::size_t>(c)];
      if (b > 0.0) {
        pos += b;
        if (chosen) chosen->push_back(c);
      }
      if (argmax < 0 || b > best[static_cast<std::size_t>(argmax)]) argmax = c;
    }
    if (pos > 0.0) return pos;
    if (chosen) chosen->push_back(argmax);
    return best[static_cast<std::size_t>(argmax)];
  };
  const auto& order = spec.topo_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto n = static_cast<std::size_t>(*it);
    best[n] = r[n] + (spec.is_leaf(*it) ? 0.0 : combine(spec.children(*it), nullptr));
  }
  std::vector<int> out, stack;
  combine(spec.roots(), &stack);
  while (!stack.empty()) {
    const int n = stack.back();
    stack.pop_back();
    out.push_back(n);
    if (!spec.is_leaf(n)) combine(spec.children(n), &stack);
  }
  return sorted_unique(out);
}

AlphaWeights argmin_alpha_tree(const NodeWeightNorms& norms, const HierarchySpec& spec) {
  if (!spec.is_tree()) throw Error(ErrorCode::NotATree, "alpha update needs a tree");
  const auto M = static_cast<std::size_t>(spec.num_nodes());
  if (norms.size() != M) throw Error(ErrorCode::LengthMismatch, "norm count differs from node count");
  for (double v : norms)
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorCode::InvalidParams, "norms must be finite and non-negative");

  // Bottom-up: a subtree behaves like a single node with norm (sqrt N + sqrt S)^2.
  std::vector<double> merged(norms), share(M, 0.0);
  const auto& order = spec.topo_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto n = static_cast<std::size_t>(*it);
    const double own = std::sqrt(norms[n]);
    if (spec.is_leaf(*it)) {
      share[n] = norms[n] > 0.0 ? 1.0 : 0.0;
      continue;
    }
    double below = 0.0;
    for (int c : spec.children(*it)) below += merged[static_cast<std::size_t>(c)];
    const double sb = std::sqrt(below);
    share[n] = (own + sb > 0.0) ? own / (own + sb) : 0.0;
    merged[n] = (own + sb) * (own + sb);
  }
  AlphaWeights alpha(M, 0.0);
  std::vector<double> budget(M, 1.0);
  for (int n : order) {
    const auto un = static_cast<std::size_t>(n);
    const double avail = spec.parents(n).empty() ? 1.0 : budget[static_cast<std::size_t>(spec.parents(n)[0])];
    alpha[un] = avail * share[un];
    budget[un] = avail * (1.0 - share[un]);
  }
  return alpha;
}

double alpha_objective(const NodeWeightNorms& norms, const AlphaWeights& alpha) {
  if (norms.size() != alpha.size()) throw Error(ErrorCode::LengthMismatch, "norm and alpha sizes differ");
  double s = 0.0;
  for (std::size_t n = 0; n < norms.size(); ++n) {
    if (norms[n] == 0.0) continue;
    if (alpha[n] <= 0.0) return std::numeric_limits<double>::infinity();
    s += norms[n] / alpha[n];
  }
  return s;
}

HierarchySpec duplicate_node(const HierarchySpec& spec, int n) {
  if (n < 0 || n >= spec.num_nodes()) throw Error(ErrorCode::InvalidNode, "node " + std::to_string(n) + " out of range");
  if (spec.is_leaf(n)) throw Error(ErrorCode::InvalidNode, "cannot duplicate leaf " + std::to_string(n));
  const int copy = spec.num_nodes();
  std::vector<std::pair<int, int>> edges;
  for (const auto& [p, c] : spec.edges()) edges.emplace_back(p == n ? copy : p, c);
  edges.emplace_back(n, copy);
  return HierarchySpec::from_edges(copy + 1, edges);
}

double shared_frobenius_norm(const std::vector<std::vector<double>>& U, const HierarchySpec& spec, int max_iters) {
  if (!spec.is_tree()) throw Error(ErrorCode::NotATree, "shared norm needs a tree");
  const auto& leaves = spec.leaves();
  const auto L = static_cast<Eigen::Index>(leaves.size());
  const auto M = static_cast<Eigen::Index>(spec.num_nodes());
  if (static_cast<Eigen::Index>(U.size()) != L) throw Error(ErrorCode::LengthMismatch, "U needs one row per leaf");
  const auto d = static_cast<Eigen::Index>(U.empty() ? 0 : U[0].size());
  Eigen::MatrixXd Um(L, d);
  for (Eigen::Index i = 0; i < L; ++i) {
    if (static_cast<Eigen::Index>(U[static_cast<std::size_t>(i)].size()) != d)
      throw Error(ErrorCode::LengthMismatch, "ragged U");
    for (Eigen::Index j = 0; j < d; ++j) Um(i, j) = U[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  if (Um.squaredNorm() == 0.0) return 0.0;
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(L, M);
  for (Eigen::Index i = 0; i < L; ++i)
    for (int n : spec.closure(leaves[static_cast<std::size_t>(i)])) P(i, n) = 1.0;

  // Alternate: least weighted-norm split of U over nodes for fixed alpha, then the exact alpha update.
  AlphaWeights alpha = compute_alpha_rho(spec, 2.0);
  double prev = std::numeric_limits<double>::infinity(), obj = prev;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(alpha.data(), M);
    const Eigen::MatrixXd A = P * a.asDiagonal() * P.transpose();
    const Eigen::MatrixXd X = A.completeOrthogonalDecomposition().solve(Um);
    const Eigen::MatrixXd V = a.asDiagonal() * P.transpose() * X;
    NodeWeightNorms norms(static_cast<std::size_t>(M));
    for (Eigen::Index n = 0; n < M; ++n) norms[static_cast<std::size_t>(n)] = V.row(n).squaredNorm();
    alpha = argmin_alpha_tree(norms, spec);
    obj = alpha_objective(norms, alpha);
    if (std::abs(prev - obj) <= 1e-13 * obj) break;
    prev = obj;
  }
  // The alternation creeps toward alpha = 0 on the boundary; the leaf-only split is always feasible.
  return std::sqrt(std::min(obj, Um.squaredNorm()));
}

// ---------------------------------------------------------------- training

HierMethod hier_method_from_name(const std::string& name) {
  if (name == "flat") return HierMethod::Flat;
  if (name == "hsvm") return HierMethod::HSVM;
  if (name == "nhsvm") return HierMethod::NHSVM;
  if (name == "ssvm") return HierMethod::SSVM;
  throw Error(ErrorCode::InvalidParams, "unknown hierarchical method '" + name + "'");
}

namespace {

double sparse_dot(const SparseVector& x, const std::vector<double>& w, std::size_t offset) { return x.dot(w, offset); }

void sparse_axpy(double a, const SparseVector& x, std::vector<double>& w, std::size_t offset) {
  for (const auto& [j, v] : x.entries) w[offset + static_cast<std::size_t>(j)] += a * v;
}

}  // namespace

HierModel train_hierarchical(const HierDataset& data, const HierarchySpec& spec, HierMethod method,
                             const HierTrainConfig& cfg) {
  if (data.examples.empty()) throw Error(ErrorCode::InvalidParams, "empty training set");
  if (cfg.epochs < 0 || !(cfg.learning_rate > 0.0) || !(cfg.reg_c >= 0.0) || cfg.alternation_period < 0)
    throw Error(ErrorCode::InvalidParams, "bad hierarchical training configuration");
  const int M = spec.num_nodes();
  const auto D = static_cast<std::size_t>(data.feature_dim);
  const auto& leaves = spec.leaves();
  for (const auto& ex : data.examples)
    if (ex.leaf < 0 || ex.leaf >= M || !spec.is_leaf(ex.leaf))
      throw Error(ErrorCode::InvalidLabel, "example label " + std::to_string(ex.leaf) + " is not a leaf");

  // Loss weights (fixed) and the initial scaling alpha.
  AlphaWeights loss_alpha(static_cast<std::size_t>(M), 1.0);
  bool sqrt_loss = true;
  switch (method) {
    case HierMethod::Flat:
      std::fill(loss_alpha.begin(), loss_alpha.end(), 0.0);
      for (int l : leaves) loss_alpha[static_cast<std::size_t>(l)] = 1.0;
      sqrt_loss = false;
      break;
    case HierMethod::HSVM: sqrt_loss = false; break;
    case HierMethod::NHSVM:
    case HierMethod::SSVM: loss_alpha = compute_alpha_rho(spec, cfg.rho); break;
  }
  if (cfg.normalized_margin && method != HierMethod::NHSVM && method != HierMethod::SSVM)
    throw Error(ErrorCode::InvalidParams, "normalized margins need nhsvm or ssvm");
  AlphaWeights alpha = loss_alpha;
  const int period = method == HierMethod::SSVM ? cfg.alternation_period : 0;

  // Loss table over leaf pairs.
  const std::size_t L = leaves.size();
  std::vector<int> leaf_index(static_cast<std::size_t>(M), -1);
  for (std::size_t i = 0; i < L; ++i) leaf_index[static_cast<std::size_t>(leaves[i])] = static_cast<int>(i);
  std::vector<double> delta(L * L, 0.0);
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = 0; j < L; ++j) {
      const auto& a = spec.closure(leaves[i]);
      const auto& b = spec.closure(leaves[j]);
      std::vector<int> diff;
      std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(diff));
      double s = 0.0;
      for (int n : diff) s += loss_alpha[static_cast<std::size_t>(n)];
      delta[i * L + j] = sqrt_loss ? std::sqrt(s) : s;
    }

  std::vector<double> V(static_cast<std::size_t>(M) * D, 0.0);
  std::vector<double> scale(static_cast<std::size_t>(M));
  auto refresh_scale = [&] {
    for (int n = 0; n < M; ++n) scale[static_cast<std::size_t>(n)] = std::sqrt(alpha[static_cast<std::size_t>(n)]);
  };
  refresh_scale();

  HierModel out;
  std::vector<std::size_t> order(data.examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(cfg.seed);
  std::vector<double> node_dot(static_cast<std::size_t>(M));
  const double shrink = 1.0 - cfg.learning_rate * cfg.reg_c;
  if (!(shrink > 0.0)) throw Error(ErrorCode::InvalidParams, "learning_rate * reg_c must be < 1");

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t idx : order) {
      const auto& ex = data.examples[idx];
      for (int n = 0; n < M; ++n)
        node_dot[static_cast<std::size_t>(n)] =
            scale[static_cast<std::size_t>(n)] * sparse_dot(ex.x, V, static_cast<std::size_t>(n) * D);
      const auto ti = static_cast<std::size_t>(leaf_index[static_cast<std::size_t>(ex.leaf)]);
      auto potential = [&](int leaf) {
        double s = 0.0;
        for (int n : spec.closure(leaf)) s += node_dot[static_cast<std::size_t>(n)];
        return s;
      };
      const double truth_pot = potential(ex.leaf);
      int worst = ex.leaf;
      double worst_val = cfg.normalized_margin ? 0.0 : truth_pot;
      for (std::size_t j = 0; j < L; ++j) {
        if (cfg.normalized_margin && !(delta[ti * L + j] > 0.0)) continue;  // indistinguishable from the truth
        const double v = cfg.normalized_margin ? (potential(leaves[j]) - truth_pot) / delta[ti * L + j] + 1.0
                                               : potential(leaves[j]) + delta[ti * L + j];
        if (v > worst_val) {
          worst_val = v;
          worst = leaves[j];
        }
      }
      for (double& w : V) w *= shrink;
      if (worst == ex.leaf) continue;
      double step = cfg.learning_rate;
      if (cfg.normalized_margin)
        step /= delta[ti * L + static_cast<std::size_t>(leaf_index[static_cast<std::size_t>(worst)])];
      for (int n : spec.closure(ex.leaf))
        sparse_axpy(step * scale[static_cast<std::size_t>(n)], ex.x, V, static_cast<std::size_t>(n) * D);
      for (int n : spec.closure(worst))
        sparse_axpy(-step * scale[static_cast<std::size_t>(n)], ex.x, V, static_cast<std::size_t>(n) * D);
    }
    if (period > 0 && (epoch + 1) % period == 0 && epoch + 1 < cfg.epochs) {
      NodeWeightNorms norms(static_cast<std::size_t>(M));
      std::vector<double> U(V.size());
      for (int n = 0; n < M; ++n) {
        double sq = 0.0;
        for (std::size_t j = 0; j < D; ++j) {
          const std::size_t k = static_cast<std::size_t>(n) * D + j;
          U[k] = scale[static_cast<std::size_t>(n)] * V[k];
          sq += U[k] * U[k];
        }
        norms[static_cast<std::size_t>(n)] = sq;
      }
      out.alpha_objective_trace.push_back(alpha_objective(norms, alpha));
      alpha = argmin_alpha_tree(norms, spec);
      out.alpha_objective_trace.push_back(alpha_objective(norms, alpha));
      refresh_scale();
      for (int n = 0; n < M; ++n) {
        const double sc = scale[static_cast<std::size_t>(n)];
        for (std::size_t j = 0; j < D; ++j) {
          const std::size_t k = static_cast<std::size_t>(n) * D + j;
          V[k] = sc > 0.0 ? U[k] / sc : 0.0;
        }
      }
    }
  }

  out.model = StructuredModel::zeros(ModelKind::Hierarchical, M, data.feature_dim);
  for (int n = 0; n < M; ++n)
    for (std::size_t j = 0; j < D; ++j) {
      const std::size_t k = static_cast<std::size_t>(n) * D + j;
      out.model.w[k] = scale[static_cast<std::size_t>(n)] * V[k];
    }
  out.alpha = alpha;
  return out;
}

HierModel shared_svm_train(const HierDataset& data, const HierarchySpec& spec, const HierTrainConfig& cfg,
                           int alternation_period) {
  HierTrainConfig c = cfg;
  c.alternation_period = alternation_period;
  return train_hierarchical(data, spec, HierMethod::SSVM, c);
}

int predict_leaf(const StructuredModel& m, const HierarchySpec& spec, const SparseVector& x) {
  if (m.kind != ModelKind::Hierarchical || m.num_outputs != spec.num_nodes())
    throw Error(ErrorCode::LengthMismatch, "model does not match the hierarchy");
  const auto D = static_cast<std::size_t>(m.feature_dim);
  std::vector<double> node_dot(static_cast<std::size_t>(m.num_outputs));
  for (int n = 0; n < m.num_outputs; ++n)
    node_dot[static_cast<std::size_t>(n)] = x.dot(m.w, static_cast<std::size_t>(n) * D);
  int best = -1;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int l : spec.leaves()) {
    double s = 0.0;
    for (int n : spec.closure(l)) s += node_dot[static_cast<std::size_t>(n)];
    if (best < 0 || s > best_val) {
      best = l;
      best_val = s;
    }
  }
  return best;
}

HierDataset hier_dataset_from_multilabel(const MultiLabelDataset& ds, const HierarchySpec& spec) {
  if (ds.num_labels > spec.num_nodes())
    throw Error(ErrorCode::LengthMismatch, "dataset has more labels than the hierarchy has nodes");
  HierDataset out;
  out.feature_dim = ds.feature_dim;
  for (std::size_t i = 0; i < ds.examples.size(); ++i) {
    const auto& ex = ds.examples[i];
    if (!spec.is_valid_label(ex.labels))
      throw Error(ErrorCode::InvalidLabel, "example " + std::to_string(i) + " is not a root-to-leaf path union");
    int leaf = -1, count = 0;
    for (int n : ex.labels)
      if (spec.is_leaf(n)) {
        leaf = n;
        ++count;
      }
    if (count != 1) throw Error(ErrorCode::InvalidLabel, "example " + std::to_string(i) + " must hold exactly one leaf");
    out.examples.push_back({ex.x, leaf});
  }
  return out;
}

}  // namespace structsvm
