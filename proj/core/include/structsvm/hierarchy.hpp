#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "structsvm/data.hpp"
#include "structsvm/model.hpp"

namespace structsvm {

// Tree, forest or DAG over nodes 0..M-1. Several roots are allowed (an implicit super-root
// that carries no weight).
class HierarchySpec {
 public:
  static HierarchySpec from_edges(int num_nodes, const std::vector<std::pair<int, int>>& edges);
  // "parent child" per line, '#' comments; node count is max id + 1.
  static HierarchySpec read(const std::string& path);
  void write(const std::string& path) const;

  int num_nodes() const { return static_cast<int>(parents_.size()); }
  const std::vector<int>& parents(int n) const { return parents_[static_cast<std::size_t>(n)]; }
  const std::vector<int>& children(int n) const { return children_[static_cast<std::size_t>(n)]; }
  const std::vector<int>& leaves() const { return leaves_; }
  const std::vector<int>& roots() const { return roots_; }
  bool is_leaf(int n) const { return children_[static_cast<std::size_t>(n)].empty(); }
  // At most one parent per node (a forest).
  bool is_tree() const { return is_tree_; }
  // Parents before children.
  const std::vector<int>& topo_order() const { return topo_; }
  // The node and all its ancestors, sorted.
  const std::vector<int>& closure(int n) const { return closure_[static_cast<std::size_t>(n)]; }
  std::vector<std::pair<int, int>> edges() const;

  // Ancestor-closed and every member either a leaf or a parent of another member.
  bool is_valid_label(const std::vector<int>& nodes) const;

 private:
  std::vector<std::vector<int>> parents_, children_, closure_;
  std::vector<int> leaves_, roots_, topo_;
  bool is_tree_ = true;
};

using AlphaWeights = std::vector<double>;
using NodeWeightNorms = std::vector<double>;

// min sum alpha^rho with per-leaf path sums = 1 (or in [1, T] when relaxed). DAGs default to T = 1.5.
AlphaWeights compute_alpha_rho(const HierarchySpec& spec, double rho, std::optional<double> relaxed_T = std::nullopt);

// max min alpha with per-leaf path sums = 1; directional adds alpha_child >= alpha_parent.
AlphaWeights compute_alpha_maxmin(const HierarchySpec& spec, bool directional);

std::vector<std::pair<int, double>> normalized_attributes(const HierarchySpec& spec, const AlphaWeights& alpha,
                                                          const std::vector<int>& y);

// sqrt(sum of alpha over the symmetric difference).
double normalized_error(const HierarchySpec& spec, const AlphaWeights& alpha, const std::vector<int>& y,
                        const std::vector<int>& y_prime);

// Max over valid labels of sum_{n in y} r_n, with +1 on leaves outside y_true and -1 on leaves inside.
std::vector<int> tree_multilabel_argmax(const HierarchySpec& spec, const std::vector<double>& node_scores,
                                        const std::vector<int>& y_true);

// Exact minimizer of sum N_n / alpha_n subject to per-leaf path sums <= 1.
AlphaWeights argmin_alpha_tree(const NodeWeightNorms& norms, const HierarchySpec& spec);
// sum N_n / alpha_n with 0/0 = 0.
double alpha_objective(const NodeWeightNorms& norms, const AlphaWeights& alpha);

// Splices a copy n' under n: n' takes over n's children. Leaves are rejected.
HierarchySpec duplicate_node(const HierarchySpec& spec, int n);

// Structured shared Frobenius norm of U (one row per leaf, rows in spec.leaves() order).
double shared_frobenius_norm(const std::vector<std::vector<double>>& U, const HierarchySpec& spec, int max_iters = 500);

// ---------------------------------------------------------------- single-label training

struct HierExample {
  SparseVector x;
  int leaf = 0;
};

struct HierDataset {
  int feature_dim = 0;
  std::vector<HierExample> examples;
};

enum class HierMethod { Flat, HSVM, NHSVM, SSVM };

HierMethod hier_method_from_name(const std::string& name);

struct HierTrainConfig {
  double reg_c = 1e-4;
  double learning_rate = 0.1;
  int epochs = 20;
  std::uint64_t seed = 1;
  double rho = 2.0;
  int alternation_period = 0;  // SSVM: epochs between alpha updates; 0 means never
  // NHSVM/SSVM: divide each margin by ||L(y) - L(y_i)|| and use a unit loss.
  bool normalized_margin = false;
};

struct HierModel {
  StructuredModel model;  // hierarchical kind; rows are sqrt(alpha_n) * W_n
  AlphaWeights alpha;
  std::vector<double> alpha_objective_trace;  // SSVM: sum ||U_n||^2 / alpha_n before/after each update
};

HierModel train_hierarchical(const HierDataset& data, const HierarchySpec& spec, HierMethod method,
                             const HierTrainConfig& cfg);

// Alternates SGD on V (U = sqrt(alpha) V) with exact alpha updates.
HierModel shared_svm_train(const HierDataset& data, const HierarchySpec& spec, const HierTrainConfig& cfg,
                           int alternation_period);

// Leaf with the largest path potential; ties go to the smaller id.
int predict_leaf(const StructuredModel& m, const HierarchySpec& spec, const SparseVector& x);

// Conversion from ancestor-closed label sets.
HierDataset hier_dataset_from_multilabel(const MultiLabelDataset& ds, const HierarchySpec& spec);

}  // namespace structsvm
