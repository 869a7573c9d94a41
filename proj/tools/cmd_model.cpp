#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "commands.hpp"
#include "json.hpp"
#include "structsvm/error.hpp"
#include "structsvm/hierarchy.hpp"
#include "structsvm/trainer.hpp"

namespace structsvm::cli {

namespace {

using nlohmann::json;

json metrics_json(const Metrics& m) {
  return {{"accuracy", m.accuracy}, {"hamming", m.hamming}, {"micro_f1", m.micro_f1}, {"macro_f1", m.macro_f1}};
}

// (C/2)||w||^2 + mean loss-augmented value.
template <class Dataset>
double objective(const StructuredModel& m, const Dataset& data, const TrainConfig& cfg) {
  double loss = 0.0;
  for (const auto& ex : data.examples) loss += std::max(0.0, infer(m, ex, cfg).value);
  double sq = 0.0;
  for (double v : m.w) sq += v * v;
  return 0.5 * cfg.reg_c * sq + loss / static_cast<double>(data.examples.size());
}

void require_dim(const StructuredModel& m, int feature_dim) {
  if (m.feature_dim != feature_dim)
    throw Error(ErrorCode::LengthMismatch, "model feature dimension " + std::to_string(m.feature_dim) +
                                               " does not match the data (" + std::to_string(feature_dim) + ")");
}

Metrics sequence_metrics(const StructuredModel& m, const SequenceDataset& ds) {
  std::vector<std::vector<int>> pred, gold;
  for (const auto& ex : ds.examples) {
    pred.push_back(predict(m, ex));
    gold.push_back(ex.states);
  }
  return evaluate_sequences(pred, gold, std::max(m.num_outputs, ds.num_states));
}

Metrics set_metrics(const StructuredModel& m, const MultiLabelDataset& ds) {
  std::vector<std::vector<int>> pred, gold;
  for (const auto& ex : ds.examples) {
    pred.push_back(predict(m, ex));
    gold.push_back(ex.labels);
  }
  return evaluate_sets(pred, gold, std::max(m.num_outputs, ds.num_labels));
}

// Leaf predictions scored as ancestor-closed label sets.
Metrics hier_metrics(const StructuredModel& m, const HierarchySpec& spec, const HierDataset& ds) {
  std::vector<std::vector<int>> pred, gold;
  for (const auto& ex : ds.examples) {
    pred.push_back(spec.closure(predict_leaf(m, spec, ex.x)));
    gold.push_back(spec.closure(ex.leaf));
  }
  return evaluate_sets(pred, gold, spec.num_nodes());
}

std::string join(const std::vector<int>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

int cmd_train(const TrainOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  auto seconds = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  json out{{"command", "train"}, {"kind", o.kind}, {"model", o.out}};

  if (o.kind == "hier") {
    if (o.hierarchy.empty()) throw Error(ErrorCode::InvalidParams, "--hierarchy is required for kind hier");
    const auto spec = HierarchySpec::read(o.hierarchy);
    const auto ds = hier_dataset_from_multilabel(read_multilabel(o.data), spec);
    HierTrainConfig cfg;
    cfg.reg_c = o.c;
    cfg.learning_rate = o.lr;
    cfg.epochs = o.epochs;
    cfg.seed = o.seed;
    cfg.rho = o.rho;
    cfg.normalized_margin = o.normalized;
    cfg.alternation_period = o.period;
    const auto method = hier_method_from_name(o.method);
    const auto m = train_hierarchical(ds, spec, method, cfg);
    save_model(o.out, m.model);
    out["method"] = o.method;
    out["examples"] = ds.examples.size();
    out["alpha"] = m.alpha;
    out["alpha_updates"] = m.alpha_objective_trace.size() / 2;
    out["metrics"] = metrics_json(hier_metrics(m.model, spec, ds));
    out["seconds"] = seconds();
    std::cout << out.dump() << std::endl;
    return kOk;
  }

  TrainConfig cfg;
  cfg.reg_c = o.c;
  cfg.learning_rate = o.lr;
  cfg.decay = o.decay;
  cfg.epochs = o.epochs;
  cfg.seed = o.seed;
  cfg.loss = BiCriteriaLoss::from_name(o.loss, o.alpha, o.beta, o.scale);
  cfg.inference = inference_from_name(o.infer);
  cfg.warm_start = !o.cold;
  TrainStats stats;
  out["loss"] = cfg.loss.name();
  out["inference"] = o.infer;
  if (o.kind == "chain") {
    const auto ds = read_sequences(o.data);
    const auto m = sgd_train(ds, cfg, &stats);
    save_model(o.out, m);
    out["examples"] = ds.examples.size();
    out["objective"] = objective(m, ds, cfg);
    out["metrics"] = metrics_json(sequence_metrics(m, ds));
  } else {
    const auto ds = read_multilabel(o.data);
    const auto m = sgd_train(ds, cfg, &stats);
    save_model(o.out, m);
    out["examples"] = ds.examples.size();
    out["objective"] = objective(m, ds, cfg);
    out["metrics"] = metrics_json(set_metrics(m, ds));
  }
  out["avg_oracle_calls"] = stats.avg_calls();
  out["seconds"] = seconds();
  std::cout << out.dump() << std::endl;
  return kOk;
}

int cmd_predict(const PredictOptions& o) {
  const auto m = load_model(o.model);
  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) throw Error(ErrorCode::Io, "cannot write '" + o.out + "'");
  }
  std::ostream& os = o.out.empty() ? std::cout : file;
  switch (m.kind) {
    case ModelKind::Chain: {
      const auto ds = read_sequences(o.data);
      require_dim(m, ds.feature_dim);
      for (const auto& ex : ds.examples) os << join(predict(m, ex), ' ') << '\n';
      break;
    }
    case ModelKind::MultiLabel: {
      const auto ds = read_multilabel(o.data);
      require_dim(m, ds.feature_dim);
      for (const auto& ex : ds.examples) {
        const auto y = predict(m, ex);
        os << (y.empty() ? "-" : join(y, ',')) << '\n';
      }
      break;
    }
    case ModelKind::Hierarchical: {
      if (o.hierarchy.empty()) throw Error(ErrorCode::InvalidParams, "--hierarchy is required for hierarchical models");
      const auto spec = HierarchySpec::read(o.hierarchy);
      const auto ds = read_multilabel(o.data);
      require_dim(m, ds.feature_dim);
      for (const auto& ex : ds.examples) os << predict_leaf(m, spec, ex.x) << '\n';
      break;
    }
  }
  return kOk;
}

int cmd_eval(const PredictOptions& o) {
  const auto m = load_model(o.model);
  json out{{"command", "eval"}, {"kind", model_kind_name(m.kind)}};
  switch (m.kind) {
    case ModelKind::Chain: {
      const auto ds = read_sequences(o.data);
      require_dim(m, ds.feature_dim);
      out["examples"] = ds.examples.size();
      out["metrics"] = metrics_json(sequence_metrics(m, ds));
      break;
    }
    case ModelKind::MultiLabel: {
      const auto ds = read_multilabel(o.data);
      require_dim(m, ds.feature_dim);
      out["examples"] = ds.examples.size();
      out["metrics"] = metrics_json(set_metrics(m, ds));
      break;
    }
    case ModelKind::Hierarchical: {
      if (o.hierarchy.empty()) throw Error(ErrorCode::InvalidParams, "--hierarchy is required for hierarchical models");
      const auto spec = HierarchySpec::read(o.hierarchy);
      const auto ds = hier_dataset_from_multilabel(read_multilabel(o.data), spec);
      require_dim(m, ds.feature_dim);
      out["examples"] = ds.examples.size();
      out["metrics"] = metrics_json(hier_metrics(m, spec, ds));
      break;
    }
  }
  std::cout << out.dump() << std::endl;
  return kOk;
}

}  // namespace structsvm::cli
