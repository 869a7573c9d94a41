#pragma once

#include <string>
#include <vector>

namespace structsvm {

enum class ModelKind { Chain, MultiLabel, Hierarchical };

const char* model_kind_name(ModelKind kind);

// Linear weights. Layouts:
//   chain:        emission [state * D + j], then transitions [S * D + prev * S + cur]
//   multilabel:   [label * D + j]
//   hierarchical: [node * D + j], already scaled by sqrt(alpha)
struct StructuredModel {
  ModelKind kind = ModelKind::Chain;
  int num_outputs = 0;  // states, labels or nodes
  int feature_dim = 0;
  std::vector<double> w;

  static StructuredModel zeros(ModelKind kind, int num_outputs, int feature_dim);
  static std::size_t dimension(ModelKind kind, int num_outputs, int feature_dim);
};

// Header "structsvm-model v1 <kind> <outputs> <dim>", then one weight per line (17 significant digits).
void save_model(const std::string& path, const StructuredModel& m);
StructuredModel load_model(const std::string& path);

}  // namespace structsvm
