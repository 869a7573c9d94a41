#include "structsvm/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <set>

#include "structsvm/error.hpp"
#include "structsvm/hull_search.hpp"
#include "structsvm/search.hpp"

namespace structsvm {

InferenceMethod inference_from_name(const std::string& name) {
  if (name == "margin") return InferenceMethod::MarginArgmax;
  if (name == "binary") return InferenceMethod::BinarySearch;
  if (name == "bisect" || name == "bisecting") return InferenceMethod::Bisecting;
  if (name == "angular") return InferenceMethod::Angular;
  if (name == "hull") return InferenceMethod::ConvexHull;
  throw Error(ErrorCode::InvalidParams, "unknown inference method '" + name + "'");
}

namespace {

bool is_slack_search(InferenceMethod m) {
  return m == InferenceMethod::BinarySearch || m == InferenceMethod::Bisecting || m == InferenceMethod::Angular;
}

void check_model(const StructuredModel& m, ModelKind kind) {
  if (m.kind != kind) throw Error(ErrorCode::InvalidParams, "model kind does not match the data");
  if (m.w.size() != StructuredModel::dimension(m.kind, m.num_outputs, m.feature_dim)) {
    throw Error(ErrorCode::LengthMismatch, "weight vector has the wrong length");
  }
}

// Runs a Phi = h*g search over an oracle whose h carries the +1 offset; returns the label id.
std::optional<LabelId> slack_search(const LambdaOracle& shifted, InferenceMethod method, int* calls,
                                    const std::function<EnumerationOracle()>& enumerate) {
  SearchResult r;
  switch (method) {
    case InferenceMethod::BinarySearch: r = binary_search_sgd(shifted, 1e-2, 1e2, 1e-6); break;
    case InferenceMethod::Bisecting: r = bisecting_search(shifted, 1.0, 60); break;
    case InferenceMethod::Angular: {
      const EnumerationOracle e = enumerate();
      r = angular_search(e, 1.0, 2 * static_cast<int>(e.points().size()) + 1);
      break;
    }
    default: break;
  }
  *calls = r.oracle_calls;
  if (!r.best) return std::nullopt;
  return r.best->id;
}

InferenceResult finish(const FractionalLabel& label, const BiCriteriaLoss& loss, int calls) {
  InferenceResult r;
  r.label = label;
  r.value = loss.value(label.h(), label.g());
  r.oracle_calls = calls;
  return r;
}

}  // namespace

ChainInstance chain_instance(const StructuredModel& m, const SequenceExample& ex) {
  check_model(m, ModelKind::Chain);
  const int S = m.num_outputs, D = m.feature_dim;
  const int L = static_cast<int>(ex.tokens.size());
  if (static_cast<int>(ex.states.size()) != L) throw Error(ErrorCode::LengthMismatch, "tokens and states differ in length");
  ChainInstance inst;
  inst.length = L;
  inst.num_states = S;
  inst.true_label = ex.states;
  inst.unary.assign(static_cast<std::size_t>(L * S), 0.0);
  inst.pairwise.assign(static_cast<std::size_t>(L * S * S), 0.0);
  const std::size_t trans = static_cast<std::size_t>(S) * static_cast<std::size_t>(D);
  for (int p = 0; p < L; ++p) {
    for (int s = 0; s < S; ++s) {
      inst.unary[static_cast<std::size_t>(p * S + s)] = ex.tokens[p].dot(m.w, static_cast<std::size_t>(s) * D);
      if (p > 0) {
        for (int t = 0; t < S; ++t) {
          inst.pairwise[static_cast<std::size_t>((p * S + t) * S + s)] = m.w[trans + static_cast<std::size_t>(t * S + s)];
        }
      }
    }
  }
  return inst;
}

std::vector<double> multilabel_scores(const StructuredModel& m, const MultiLabelExample& ex) {
  check_model(m, ModelKind::MultiLabel);
  std::vector<double> s(static_cast<std::size_t>(m.num_outputs));
  for (int j = 0; j < m.num_outputs; ++j) s[static_cast<std::size_t>(j)] = ex.x.dot(m.w, static_cast<std::size_t>(j) * m.feature_dim);
  return s;
}

InferenceResult infer(const StructuredModel& m, const SequenceExample& ex, const TrainConfig& cfg,
                      const std::vector<LabelId>& warm, HullState* vertices_out) {
  if (cfg.loss.negative_g()) throw Error(ErrorCode::InvalidParams, "chains use a nonnegative loss coordinate");
  const ChainInstance inst = chain_instance(m, ex);
  const ChainOracle oracle(inst);
  int calls = 0;
  if (cfg.inference == InferenceMethod::MarginArgmax) {
    const OracleAnswer a = oracle.query(1.0);
    return finish({a.point, std::nullopt, 0.0}, cfg.loss, 1);
  }
  if (is_slack_search(cfg.inference)) {
    const ChainOracle shifted(inst, 1.0);
    const auto id = slack_search(shifted, cfg.inference, &calls, [&] { return shifted.enumerate(); });
    const LabelPoint p = oracle.point_of(id.value_or(inst.encode(inst.true_label)));
    return finish({p, std::nullopt, 0.0}, cfg.loss, calls);
  }
  HullSearchResult h = convex_hull_search(oracle, cfg.loss, warm);
  if (vertices_out) *vertices_out = h.state;
  return finish(h.label, cfg.loss, h.oracle_calls);
}

InferenceResult infer(const StructuredModel& m, const MultiLabelExample& ex, const TrainConfig& cfg,
                      const std::vector<LabelId>& warm, HullState* vertices_out) {
  const auto scores = multilabel_scores(m, ex);
  const auto conv = cfg.loss.negative_g() ? MultiLabelConvention::MicroF1 : MultiLabelConvention::MarginHamming;
  const MultiLabelOracle oracle(scores, ex.labels, conv);
  int calls = 0;
  if (cfg.inference == InferenceMethod::MarginArgmax) {
    const OracleAnswer a = oracle.query(1.0);
    return finish({a.point, std::nullopt, 0.0}, cfg.loss, 1);
  }
  if (is_slack_search(cfg.inference)) {
    if (conv != MultiLabelConvention::MarginHamming) throw Error(ErrorCode::InvalidParams, "slack searches need the Hamming convention");
    const MultiLabelOracle shifted(scores, ex.labels, conv, 1.0);
    auto enumerate = [&] {
      if (scores.size() > 16) throw Error(ErrorCode::UnsupportedBackend, "angular search needs <= 16 labels");
      std::vector<LabelPoint> pts;
      for (LabelId id = 0; id < (LabelId{1} << scores.size()); ++id) pts.push_back(shifted.point_of(id));
      return EnumerationOracle(std::move(pts));
    };
    const auto id = slack_search(shifted, cfg.inference, &calls, enumerate);
    const LabelPoint p = oracle.point_of(id.value_or(MultiLabelOracle::id_of(ex.labels)));
    return finish({p, std::nullopt, 0.0}, cfg.loss, calls);
  }
  HullSearchResult h = convex_hull_search(oracle, cfg.loss, warm);
  if (vertices_out) *vertices_out = h.state;
  return finish(h.label, cfg.loss, h.oracle_calls);
}

namespace {

double truth_value(const BiCriteriaLoss& loss, double g_truth) { return loss.value(0.0, g_truth); }

void shrink(StructuredModel& m, double lr, double reg_c) {
  const double f = 1.0 - lr * reg_c;
  for (double& v : m.w) v *= f;
}

double clipped_dh(const BiCriteriaLoss& loss, const FractionalLabel& y) {
  const double dh = loss.grad(y.h(), y.g()).dh;
  if (!std::isfinite(dh)) return dh > 0 ? 1e6 : 0.0;
  return std::clamp(dh, 0.0, 1e6);
}

void add_chain_features(StructuredModel& m, const SequenceExample& ex, const std::vector<int>& y, double scale) {
  const std::size_t D = static_cast<std::size_t>(m.feature_dim), S = static_cast<std::size_t>(m.num_outputs);
  for (std::size_t p = 0; p < y.size(); ++p) {
    const std::size_t base = static_cast<std::size_t>(y[p]) * D;
    for (const auto& [j, v] : ex.tokens[p].entries) m.w[base + static_cast<std::size_t>(j)] += scale * v;
    if (p > 0) m.w[S * D + static_cast<std::size_t>(y[p - 1]) * S + static_cast<std::size_t>(y[p])] += scale;
  }
}

void add_label_features(StructuredModel& m, const MultiLabelExample& ex, const std::vector<int>& y, double scale) {
  const std::size_t D = static_cast<std::size_t>(m.feature_dim);
  for (int l : y) {
    for (const auto& [j, v] : ex.x.entries) m.w[static_cast<std::size_t>(l) * D + static_cast<std::size_t>(j)] += scale * v;
  }
}

template <class AddFeatures, class Decode>
void step_impl(StructuredModel& m, const InferenceResult& r, const BiCriteriaLoss& loss, double lr, double reg_c,
               double g_truth, const std::vector<int>& truth, AddFeatures add, Decode decode) {
  shrink(m, lr, reg_c);
  if (!(r.value > truth_value(loss, g_truth))) return;
  const double coef = lr * clipped_dh(loss, r.label);
  if (coef == 0.0) return;
  const double t = r.label.second ? r.label.t : 0.0;
  add(decode(r.label.first.id), -coef * (1.0 - t));
  if (r.label.second) add(decode(r.label.second->id), -coef * t);
  add(truth, coef);
}

}  // namespace

void subgradient_step(StructuredModel& m, const SequenceExample& ex, const InferenceResult& r,
                      const BiCriteriaLoss& loss, double lr, double reg_c) {
  check_model(m, ModelKind::Chain);
  ChainInstance shape;
  shape.length = static_cast<int>(ex.states.size());
  shape.num_states = m.num_outputs;
  step_impl(
      m, r, loss, lr, reg_c, 0.0, ex.states,
      [&](const std::vector<int>& y, double s) { add_chain_features(m, ex, y, s); },
      [&](LabelId id) { return shape.decode(id); });
}

void subgradient_step(StructuredModel& m, const MultiLabelExample& ex, const InferenceResult& r,
                      const BiCriteriaLoss& loss, double lr, double reg_c) {
  check_model(m, ModelKind::MultiLabel);
  const double g_truth = loss.negative_g() ? -2.0 * static_cast<double>(ex.labels.size()) : 0.0;
  step_impl(
      m, r, loss, lr, reg_c, g_truth, ex.labels,
      [&](const std::vector<int>& y, double s) { add_label_features(m, ex, y, s); },
      [](LabelId id) { return MultiLabelOracle::labels_of(id); });
}

namespace {

template <class Data, class Kind>
StructuredModel train_impl(const Data& data, const TrainConfig& cfg, TrainStats* stats, StructuredModel m, Kind) {
  if (!(cfg.reg_c > 0.0) || !(cfg.learning_rate > 0.0) || cfg.epochs < 0 || cfg.decay < 0.0) {
    throw Error(ErrorCode::InvalidParams, "training needs reg_c > 0, learning_rate > 0, epochs >= 0");
  }
  if (data.examples.empty()) throw Error(ErrorCode::InvalidParams, "empty training set");
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(data.examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<LabelId>> warm(data.examples.size());
  long long step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t idx : order) {
      const auto& ex = data.examples[idx];
      const double lr = cfg.learning_rate / (1.0 + cfg.decay * static_cast<double>(step));
      InferenceResult r;
      HullState vertices;
      try {
        const bool use_warm = cfg.warm_start && cfg.inference == InferenceMethod::ConvexHull;
        r = infer(m, ex, cfg, use_warm ? warm[idx] : std::vector<LabelId>{}, &vertices);
      } catch (const Error& e) {
        throw Error(ErrorCode::InferenceFailure, "example " + std::to_string(idx) + ": " + e.what());
      }
      if (cfg.warm_start && cfg.inference == InferenceMethod::ConvexHull) {
        warm[idx].clear();
        for (const auto& v : vertices.vertices()) warm[idx].push_back(v.id);
      }
      if (stats) {
        stats->inference_calls += r.oracle_calls;
        ++stats->inferences;
      }
      subgradient_step(m, ex, r, cfg.loss, lr, cfg.reg_c);
      ++step;
    }
    if (stats && cfg.track_objective) {
      double loss_sum = 0.0;
      for (const auto& ex : data.examples) loss_sum += std::max(0.0, infer(m, ex, cfg).value);
      double sq = 0.0;
      for (double v : m.w) sq += v * v;
      stats->epoch_objective.push_back(0.5 * cfg.reg_c * sq + loss_sum / static_cast<double>(data.examples.size()));
    }
  }
  return m;
}

}  // namespace

StructuredModel sgd_train(const SequenceDataset& data, const TrainConfig& cfg, TrainStats* stats) {
  if (data.num_states <= 0 || data.feature_dim <= 0) throw Error(ErrorCode::InvalidParams, "bad sequence dataset shape");
  return train_impl(data, cfg, stats, StructuredModel::zeros(ModelKind::Chain, data.num_states, data.feature_dim), 0);
}

StructuredModel sgd_train(const MultiLabelDataset& data, const TrainConfig& cfg, TrainStats* stats) {
  if (data.num_labels <= 0 || data.feature_dim <= 0) throw Error(ErrorCode::InvalidParams, "bad multi-label dataset shape");
  return train_impl(data, cfg, stats, StructuredModel::zeros(ModelKind::MultiLabel, data.num_labels, data.feature_dim), 0);
}

double regularized_objective(const StructuredModel& m, const SequenceDataset& data, const TrainConfig& cfg) {
  double loss_sum = 0.0;
  for (const auto& ex : data.examples) loss_sum += std::max(0.0, infer(m, ex, cfg).value);
  double sq = 0.0;
  for (double v : m.w) sq += v * v;
  return 0.5 * cfg.reg_c * sq + loss_sum / static_cast<double>(data.examples.size());
}

std::vector<int> predict(const StructuredModel& m, const SequenceExample& ex) {
  SequenceExample copy{ex.tokens, std::vector<int>(ex.tokens.size(), 0)};
  const ChainInstance inst = chain_instance(m, copy);
  const ChainOracle oracle(inst);
  return inst.decode(oracle.query(0.0).point.id);
}

std::vector<int> predict(const StructuredModel& m, const MultiLabelExample& ex) {
  const auto s = multilabel_scores(m, ex);
  std::vector<int> out;
  for (std::size_t j = 0; j < s.size(); ++j)
    if (s[j] > 0.0) out.push_back(static_cast<int>(j));
  return out;
}

namespace {

double f1(long long tp, long long fp, long long fn) {
  const long long den = 2 * tp + fp + fn;
  return den == 0 ? 1.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(den);
}

}  // namespace

Metrics evaluate_sequences(const std::vector<std::vector<int>>& pred, const std::vector<std::vector<int>>& gold,
                           int num_states) {
  if (pred.size() != gold.size()) throw Error(ErrorCode::LengthMismatch, "prediction and gold counts differ");
  Metrics out;
  if (pred.empty()) return out;
  std::vector<long long> tp(static_cast<std::size_t>(num_states)), fp(tp), fn(tp);
  long long exact = 0, wrong = 0, total = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i].size() != gold[i].size()) throw Error(ErrorCode::LengthMismatch, "sequence lengths differ");
    exact += pred[i] == gold[i];
    for (std::size_t p = 0; p < pred[i].size(); ++p) {
      const int a = pred[i][p], b = gold[i][p];
      if (a < 0 || b < 0 || a >= num_states || b >= num_states) throw Error(ErrorCode::InvalidLabel, "state out of range");
      ++total;
      if (a == b) {
        ++tp[static_cast<std::size_t>(a)];
      } else {
        ++wrong;
        ++fp[static_cast<std::size_t>(a)];
        ++fn[static_cast<std::size_t>(b)];
      }
    }
  }
  out.accuracy = static_cast<double>(exact) / static_cast<double>(pred.size());
  out.hamming = total ? static_cast<double>(wrong) / static_cast<double>(total) : 0.0;
  out.micro_f1 = total ? static_cast<double>(total - wrong) / static_cast<double>(total) : 1.0;
  double macro = 0.0;
  for (int s = 0; s < num_states; ++s) macro += f1(tp[static_cast<std::size_t>(s)], fp[static_cast<std::size_t>(s)], fn[static_cast<std::size_t>(s)]);
  out.macro_f1 = macro / num_states;
  return out;
}

Metrics evaluate_sets(const std::vector<std::vector<int>>& pred, const std::vector<std::vector<int>>& gold,
                      int num_labels) {
  if (pred.size() != gold.size()) throw Error(ErrorCode::LengthMismatch, "prediction and gold counts differ");
  Metrics out;
  if (pred.empty()) return out;
  std::vector<long long> tp(static_cast<std::size_t>(num_labels)), fp(tp), fn(tp);
  long long exact = 0, sym = 0, inter = 0, sizes = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const std::set<int> a(pred[i].begin(), pred[i].end()), b(gold[i].begin(), gold[i].end());
    exact += a == b;
    sizes += static_cast<long long>(a.size() + b.size());
    for (int l : a) {
      if (l < 0 || l >= num_labels) throw Error(ErrorCode::InvalidLabel, "label out of range");
      if (b.count(l)) {
        ++inter;
        ++tp[static_cast<std::size_t>(l)];
      } else {
        ++sym;
        ++fp[static_cast<std::size_t>(l)];
      }
    }
    for (int l : b) {
      if (l < 0 || l >= num_labels) throw Error(ErrorCode::InvalidLabel, "label out of range");
      if (!a.count(l)) {
        ++sym;
        ++fn[static_cast<std::size_t>(l)];
      }
    }
  }
  const double n = static_cast<double>(pred.size());
  out.accuracy = static_cast<double>(exact) / n;
  out.hamming = static_cast<double>(sym) / (n * num_labels);
  out.micro_f1 = sizes ? 2.0 * static_cast<double>(inter) / static_cast<double>(sizes) : 1.0;
  double macro = 0.0;
  for (int l = 0; l < num_labels; ++l) macro += f1(tp[static_cast<std::size_t>(l)], fp[static_cast<std::size_t>(l)], fn[static_cast<std::size_t>(l)]);
  out.macro_f1 = macro / num_labels;
  return out;
}

}  // namespace structsvm
