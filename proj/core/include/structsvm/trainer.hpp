#pragma once

#include <cstdint>
#include <vector>

#include "structsvm/data.hpp"
#include "structsvm/geometry.hpp"
#include "structsvm/losses.hpp"
#include "structsvm/model.hpp"
#include "structsvm/oracle.hpp"

namespace structsvm {

enum class InferenceMethod { MarginArgmax, BinarySearch, Bisecting, Angular, ConvexHull };

InferenceMethod inference_from_name(const std::string& name);

struct TrainConfig {
  double reg_c = 1e-3;
  double learning_rate = 0.01;
  double decay = 0.0;  // lr_t = lr / (1 + decay * t)
  int epochs = 10;
  InferenceMethod inference = InferenceMethod::MarginArgmax;
  BiCriteriaLoss loss = BiCriteriaLoss::margin();
  std::uint64_t seed = 1;
  bool warm_start = true;         // hull search reuses each example's last vertices
  bool track_objective = false;   // extra pass per epoch
};

struct TrainStats {
  std::vector<double> epoch_objective;
  long long inference_calls = 0;  // oracle calls summed over all steps
  long long inferences = 0;
  double avg_calls() const { return inferences ? static_cast<double>(inference_calls) / inferences : 0.0; }
};

struct Metrics {
  double accuracy = 0.0;
  double hamming = 0.0;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
};

// Result of loss-augmented inference on one example.
struct InferenceResult {
  FractionalLabel label;  // coordinates in the (margin, loss) convention
  double value = 0.0;     // psi at the label
  int oracle_calls = 0;
};

// Chain scores for one sequence under the model.
ChainInstance chain_instance(const StructuredModel& m, const SequenceExample& ex);
std::vector<double> multilabel_scores(const StructuredModel& m, const MultiLabelExample& ex);

InferenceResult infer(const StructuredModel& m, const SequenceExample& ex, const TrainConfig& cfg,
                      const std::vector<LabelId>& warm = {}, HullState* vertices_out = nullptr);
InferenceResult infer(const StructuredModel& m, const MultiLabelExample& ex, const TrainConfig& cfg,
                      const std::vector<LabelId>& warm = {}, HullState* vertices_out = nullptr);

// w <- w - lr * (reg_c * w + dpsi/dh * sum_e weight_e * (phi(x, y_e) - phi(x, y_true))),
// with dpsi/dh taken at the (possibly fractional) point and clipped to [0, 1e6].
void subgradient_step(StructuredModel& m, const SequenceExample& ex, const InferenceResult& r,
                      const BiCriteriaLoss& loss, double lr, double reg_c);
void subgradient_step(StructuredModel& m, const MultiLabelExample& ex, const InferenceResult& r,
                      const BiCriteriaLoss& loss, double lr, double reg_c);

StructuredModel sgd_train(const SequenceDataset& data, const TrainConfig& cfg, TrainStats* stats = nullptr);
StructuredModel sgd_train(const MultiLabelDataset& data, const TrainConfig& cfg, TrainStats* stats = nullptr);

std::vector<int> predict(const StructuredModel& m, const SequenceExample& ex);
std::vector<int> predict(const StructuredModel& m, const MultiLabelExample& ex);

// Exact-match accuracy, per-position error, token micro-F1 and per-state macro-F1.
Metrics evaluate_sequences(const std::vector<std::vector<int>>& pred, const std::vector<std::vector<int>>& gold,
                           int num_states);
// Label-set metrics over a universe of num_labels labels.
Metrics evaluate_sets(const std::vector<std::vector<int>>& pred, const std::vector<std::vector<int>>& gold,
                      int num_labels);

// (C/2)||w||^2 + mean per-example loss value under the configured inference.
double regularized_objective(const StructuredModel& m, const SequenceDataset& data, const TrainConfig& cfg);

}  // namespace structsvm
