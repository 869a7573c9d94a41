#include "structsvm/synthetic.hpp"

#include <cmath>
#include <random>

#include "structsvm/error.hpp"

namespace structsvm {

namespace {

SparseVector unit_gaussian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(dim));
  double sq = 0.0;
  for (double& x : v) {
    x = normal(rng);
    sq += x * x;
  }
  const double inv = sq > 0.0 ? 1.0 / std::sqrt(sq) : 0.0;
  SparseVector out;
  for (int j = 0; j < dim; ++j) out.entries.emplace_back(j, v[static_cast<std::size_t>(j)] * inv);
  return out;
}

std::vector<double> gaussian_vector(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(dim));
  for (double& x : v) x = normal(rng);
  return v;
}

}  // namespace

SequenceDataset generate_planted_chains(const PlantedChainParams& p) {
  if (p.num_examples <= 0 || p.length <= 0 || p.num_states < 2 || p.vocab_per_state <= 0 || p.noise < 0.0 ||
      p.noise > 1.0 || p.stickiness < 0.0 || p.stickiness > 1.0)
    throw Error(ErrorCode::InvalidParams, "bad planted chain parameters");
  std::mt19937_64 rng(p.seed);
  std::uniform_int_distribution<int> state_dist(0, p.num_states - 1), vocab_dist(0, p.vocab_per_state - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SequenceDataset ds;
  ds.num_states = p.num_states;
  ds.feature_dim = p.num_states * p.vocab_per_state + 1;
  const int bias = ds.feature_dim - 1;
  for (int i = 0; i < p.num_examples; ++i) {
    SequenceExample ex;
    int s = state_dist(rng);
    for (int t = 0; t < p.length; ++t) {
      if (t > 0 && u(rng) >= p.stickiness) s = state_dist(rng);
      const int source = u(rng) < p.noise ? state_dist(rng) : s;
      SparseVector tok;
      tok.entries.emplace_back(source * p.vocab_per_state + vocab_dist(rng), 1.0);
      tok.entries.emplace_back(bias, 1.0);
      ex.tokens.push_back(std::move(tok));
      ex.states.push_back(s);
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

MultiLabelDataset generate_multilabel(const MultiLabelGenParams& p) {
  if (p.num_examples <= 0 || p.num_labels <= 0 || p.num_labels > 63 || p.feature_dim <= 0)
    throw Error(ErrorCode::InvalidParams, "bad multi-label generator parameters");
  std::mt19937_64 rng(p.seed);
  std::vector<std::vector<double>> W;
  for (int l = 0; l < p.num_labels; ++l) W.push_back(gaussian_vector(p.feature_dim, rng));
  MultiLabelDataset ds;
  ds.feature_dim = p.feature_dim;
  ds.num_labels = p.num_labels;
  for (int i = 0; i < p.num_examples; ++i) {
    MultiLabelExample ex;
    ex.x = unit_gaussian(p.feature_dim, rng);
    int best = 0;
    double best_score = -INFINITY;
    for (int l = 0; l < p.num_labels; ++l) {
      const double s = ex.x.dot(W[static_cast<std::size_t>(l)]);
      if (s > p.threshold) ex.labels.push_back(l);
      if (s > best_score) {
        best_score = s;
        best = l;
      }
    }
    if (ex.labels.empty()) ex.labels.push_back(best);
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

HierSynthetic generate_unbalanced_hierarchy(const HierGenParams& p) {
  if (p.num_examples <= 0 || p.depth <= 0 || p.feature_dim <= 0)
    throw Error(ErrorCode::InvalidParams, "bad hierarchy generator parameters");
  std::mt19937_64 rng(p.seed);
  // Level k owns nodes 2k (leaf side) and 2k+1 (recursing side; a leaf on the last level).
  std::vector<std::pair<int, int>> edges;
  for (int k = 1; k < p.depth; ++k) {
    edges.emplace_back(2 * k - 1, 2 * k);
    edges.emplace_back(2 * k - 1, 2 * k + 1);
  }
  std::vector<std::vector<double>> normals;
  for (int k = 0; k < p.depth; ++k) normals.push_back(gaussian_vector(p.feature_dim, rng));
  HierSynthetic out{HierarchySpec::from_edges(2 * p.depth, edges), {}};
  out.data.feature_dim = p.feature_dim;
  for (int i = 0; i < p.num_examples; ++i) {
    HierExample ex;
    ex.x = unit_gaussian(p.feature_dim, rng);
    ex.leaf = 2 * p.depth - 1;
    for (int k = 0; k < p.depth; ++k)
      if (ex.x.dot(normals[static_cast<std::size_t>(k)]) <= 0.0) {
        ex.leaf = 2 * k;
        break;
      }
    out.data.examples.push_back(std::move(ex));
  }
  return out;
}

HierSynthetic generate_balanced_hierarchy(const HierGenParams& p) {
  if (p.num_examples <= 0 || p.depth <= 0 || p.depth > 12 || p.feature_dim <= 0)
    throw Error(ErrorCode::InvalidParams, "bad hierarchy generator parameters");
  std::mt19937_64 rng(p.seed);
  // Level k (1-based) holds 2^k nodes; node ids run level by level.
  std::vector<std::pair<int, int>> edges;
  int first = 0, total = 0;
  for (int k = 1; k <= p.depth; ++k) total += 1 << k;
  for (int k = 1; k < p.depth; ++k) {
    const int width = 1 << k, next = first + width;
    for (int j = 0; j < width; ++j) {
      edges.emplace_back(first + j, next + 2 * j);
      edges.emplace_back(first + j, next + 2 * j + 1);
    }
    first = next;
  }
  HierSynthetic out{HierarchySpec::from_edges(total, edges), {}};
  std::vector<std::vector<double>> W;
  for (int n = 0; n < total; ++n) W.push_back(gaussian_vector(p.feature_dim, rng));
  out.data.feature_dim = p.feature_dim;
  for (int i = 0; i < p.num_examples; ++i) {
    HierExample ex;
    ex.x = unit_gaussian(p.feature_dim, rng);
    double best = -INFINITY;
    for (int l : out.spec.leaves()) {
      double s = 0.0;
      for (int n : out.spec.closure(l)) s += ex.x.dot(W[static_cast<std::size_t>(n)]);
      if (s > best) {
        best = s;
        ex.leaf = l;
      }
    }
    out.data.examples.push_back(std::move(ex));
  }
  return out;
}

MultiLabelDataset to_multilabel(const HierSynthetic& h) {
  MultiLabelDataset ds;
  ds.feature_dim = h.data.feature_dim;
  ds.num_labels = h.spec.num_nodes();
  for (const auto& ex : h.data.examples) ds.examples.push_back({ex.x, h.spec.closure(ex.leaf)});
  return ds;
}

}  // namespace structsvm
