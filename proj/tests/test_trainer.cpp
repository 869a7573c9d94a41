#include "doctest.h"

#include <cstdio>
#include <random>

#include "structsvm/error.hpp"
#include "structsvm/synthetic.hpp"
#include "structsvm/trainer.hpp"
#include "support/reference.hpp"

using namespace structsvm;

namespace {

SequenceDataset small_chains(std::uint64_t seed, int n = 200, int length = 4, int states = 2, double noise = 0.0) {
  PlantedChainParams p;
  p.num_examples = n;
  p.length = length;
  p.num_states = states;
  p.noise = noise;
  p.seed = seed;
  return generate_planted_chains(p);
}

double train_accuracy(const StructuredModel& m, const SequenceDataset& ds) {
  std::vector<std::vector<int>> pred, gold;
  for (const auto& ex : ds.examples) {
    pred.push_back(predict(m, ex));
    gold.push_back(ex.states);
  }
  return evaluate_sequences(pred, gold, ds.num_states).accuracy;
}

// Brute-force (h, g) of every labelling under the model, straight from the feature map.
std::vector<LabelPoint> chain_points(const StructuredModel& m, const SequenceExample& ex) {
  return ref::enumerate_chain(chain_instance(m, ex));
}

std::vector<double> random_weights(std::mt19937_64& rng, std::size_t n, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  std::vector<double> w(n);
  for (auto& v : w) v = nd(rng);
  return w;
}

}  // namespace

TEST_SUITE("trainer") {
  TEST_CASE("zero epochs leave the weights untouched") {
    TrainConfig cfg;
    cfg.epochs = 0;
    const auto m = sgd_train(small_chains(1, 20), cfg);
    for (double v : m.w) CHECK(v == 0.0);
  }

  TEST_CASE("separable chains are fitted under margin rescaling") {
    const auto ds = small_chains(2);
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.learning_rate = 0.1;
    cfg.reg_c = 1e-4;
    CHECK(train_accuracy(sgd_train(ds, cfg), ds) == 1.0);
  }

  TEST_CASE("training is deterministic") {
    const auto ds = small_chains(3, 100, 5, 3, 0.2);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.inference = InferenceMethod::ConvexHull;
    cfg.loss = BiCriteriaLoss::probloss();
    const auto a = sgd_train(ds, cfg), b = sgd_train(ds, cfg);
    CHECK(a.w == b.w);
    cfg.seed = 99;
    CHECK(sgd_train(ds, cfg).w != a.w);
  }

  TEST_CASE("epoch objective decreases on average") {
    std::vector<double> mean(10, 0.0);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      TrainConfig cfg;
      cfg.epochs = 10;
      cfg.seed = seed;
      cfg.learning_rate = 0.01;
      cfg.track_objective = true;
      TrainStats st;
      sgd_train(small_chains(seed, 100, 5, 3), cfg, &st);
      REQUIRE(st.epoch_objective.size() == 10);
      for (int e = 0; e < 10; ++e) mean[static_cast<std::size_t>(e)] += st.epoch_objective[static_cast<std::size_t>(e)] / 10.0;
    }
    for (int e = 1; e < 10; ++e) CHECK(mean[static_cast<std::size_t>(e)] <= mean[static_cast<std::size_t>(e - 1)] + 1e-3);
  }

  TEST_CASE("margin step on the true label only shrinks") {
    const auto ds = small_chains(4, 1);
    auto m = StructuredModel::zeros(ModelKind::Chain, ds.num_states, ds.feature_dim);
    std::mt19937_64 rng(4);
    m.w = random_weights(rng, m.w.size(), 1.0);
    const auto before = m.w;
    const ChainOracle o(chain_instance(m, ds.examples[0]));
    InferenceResult r;
    r.label = {o.point_of_sequence(ds.examples[0].states), std::nullopt, 0.0};
    r.value = BiCriteriaLoss::margin().value(r.label.h(), r.label.g());
    subgradient_step(m, ds.examples[0], r, BiCriteriaLoss::margin(), 0.1, 0.5);
    for (std::size_t i = 0; i < m.w.size(); ++i) CHECK(m.w[i] == doctest::Approx(before[i] * 0.95));
  }

  TEST_CASE("slack step scales the feature difference by g") {
    const auto ds = small_chains(5, 1, 4, 2);
    const auto& ex = ds.examples[0];
    auto m = StructuredModel::zeros(ModelKind::Chain, ds.num_states, ds.feature_dim);
    std::vector<int> y = ex.states;
    for (int p = 0; p < 3; ++p) y[static_cast<std::size_t>(p)] = 1 - y[static_cast<std::size_t>(p)];
    ChainInstance shape = chain_instance(m, ex);
    InferenceResult r;
    r.label = {{shape.encode(y), 0.0, 3.0}, std::nullopt, 0.0};
    r.value = BiCriteriaLoss::slack().value(0.0, 3.0);
    subgradient_step(m, ex, r, BiCriteriaLoss::slack(), 1.0, 0.0);
    // Expected: w = 3 * (phi(truth) - phi(y)), with phi built by hand.
    std::vector<double> expect(m.w.size(), 0.0);
    const std::size_t D = static_cast<std::size_t>(ds.feature_dim), S = static_cast<std::size_t>(ds.num_states);
    auto add = [&](const std::vector<int>& lab, double s) {
      for (std::size_t p = 0; p < lab.size(); ++p) {
        for (const auto& [j, v] : ex.tokens[p].entries) expect[static_cast<std::size_t>(lab[p]) * D + static_cast<std::size_t>(j)] += s * v;
        if (p > 0) expect[S * D + static_cast<std::size_t>(lab[p - 1]) * S + static_cast<std::size_t>(lab[p])] += s;
      }
    };
    add(ex.states, 3.0);
    add(y, -3.0);
    for (std::size_t i = 0; i < m.w.size(); ++i) CHECK(m.w[i] == doctest::Approx(expect[i]).epsilon(1e-12));
  }

  TEST_CASE("fractional step is the gradient of the frozen segment loss") {
    const auto ds = small_chains(6, 1, 5, 3, 0.3);
    const auto& ex = ds.examples[0];
    std::mt19937_64 rng(6);
    for (const auto& loss : {BiCriteriaLoss::slack(), BiCriteriaLoss::probloss(), BiCriteriaLoss::probloss_convex(),
                             BiCriteriaLoss::log_loss()}) {
      for (int trial = 0; trial < 10; ++trial) {
        auto m = StructuredModel::zeros(ModelKind::Chain, ds.num_states, ds.feature_dim);
        m.w = random_weights(rng, m.w.size(), 0.5);
        TrainConfig cfg;
        cfg.inference = InferenceMethod::ConvexHull;
        cfg.loss = loss;
        const auto r = infer(m, ex, cfg);
        if (!(r.value > loss.value(0.0, 0.0))) continue;
        const auto inst = chain_instance(m, ex);
        const LabelId a = r.label.first.id;
        const std::optional<LabelId> b = r.label.second ? std::optional<LabelId>(r.label.second->id) : std::nullopt;
        const double t = r.label.t, gA = r.label.first.g, gB = b ? r.label.second->g : 0.0;
        auto frozen = [&](const std::vector<double>& w) {
          StructuredModel mm = m;
          mm.w = w;
          const ChainOracle o(chain_instance(mm, ex));
          const double hA = o.point_of(a).h;
          if (!b) return loss.value(hA, gA);
          const double hB = o.point_of(*b).h;
          return loss.value((1 - t) * hA + t * hB, (1 - t) * gA + t * gB);
        };
        (void)inst;
        StructuredModel stepped = m;
        subgradient_step(stepped, ex, r, loss, 1.0, 0.0);
        std::vector<double> grad(m.w.size());
        for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = m.w[i] - stepped.w[i];
        for (int dir = 0; dir < 5; ++dir) {
          const auto d = random_weights(rng, m.w.size(), 1.0);
          const double eps = 1e-5;
          std::vector<double> wp = m.w, wm = m.w;
          double dot = 0;
          for (std::size_t i = 0; i < d.size(); ++i) {
            wp[i] += eps * d[i];
            wm[i] -= eps * d[i];
            dot += grad[i] * d[i];
          }
          const double fd = (frozen(wp) - frozen(wm)) / (2 * eps);
          CHECK(dot == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
        }
      }
    }
  }

  TEST_CASE("subgradient inequality") {
    const auto ds = small_chains(7, 1, 4, 2, 0.3);
    const auto& ex = ds.examples[0];
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
      auto m = StructuredModel::zeros(ModelKind::Chain, ds.num_states, ds.feature_dim);
      m.w = random_weights(rng, m.w.size(), 0.5);
      // Margin rescaling: the full max over labels is convex in w.
      auto full = [&](const std::vector<double>& w) {
        StructuredModel mm = m;
        mm.w = w;
        double best = -1e300;
        for (const auto& p : chain_points(mm, ex)) best = std::max(best, p.h + p.g);
        return best;
      };
      TrainConfig cfg;
      const auto r = infer(m, ex, cfg);
      StructuredModel stepped = m;
      subgradient_step(stepped, ex, r, cfg.loss, 1.0, 0.0);
      std::vector<double> sg(m.w.size());
      for (std::size_t i = 0; i < sg.size(); ++i) sg[i] = m.w[i] - stepped.w[i];
      const double base = full(m.w);
      if (!(r.value > 0.0)) continue;
      for (int k = 0; k < 100; ++k) {
        const auto d = random_weights(rng, m.w.size(), 0.05);
        std::vector<double> w2 = m.w;
        double dot = 0;
        for (std::size_t i = 0; i < d.size(); ++i) {
          w2[i] += d[i];
          dot += sg[i] * d[i];
        }
        CHECK(full(w2) >= base + dot - 1e-6);
      }
    }
  }

  TEST_CASE("angular inference equals the brute-force slack argmax along a trajectory") {
    const auto ds = small_chains(8, 30, 4, 2, 0.3);
    auto m = StructuredModel::zeros(ModelKind::Chain, ds.num_states, ds.feature_dim);
    TrainConfig cfg;
    cfg.inference = InferenceMethod::Angular;
    cfg.loss = BiCriteriaLoss::slack();
    for (int epoch = 0; epoch < 3; ++epoch)
      for (const auto& ex : ds.examples) {
        const auto r = infer(m, ex, cfg);
        double best = 0.0;
        for (const auto& p : chain_points(m, ex)) best = std::max(best, (p.h + 1) * p.g);
        REQUIRE(r.value == doctest::Approx(best).epsilon(1e-12));
        subgradient_step(m, ex, r, cfg.loss, 0.05, 1e-3);
      }
  }

  TEST_CASE("slack inference methods agree with brute force where exact") {
    const auto ds = small_chains(9, 20, 4, 3, 0.4);
    std::mt19937_64 rng(9);
    auto m = StructuredModel::zeros(ModelKind::Chain, ds.num_states, ds.feature_dim);
    m.w = random_weights(rng, m.w.size(), 0.5);
    for (const auto& ex : ds.examples) {
      double best = 0.0;
      for (const auto& p : chain_points(m, ex)) best = std::max(best, (p.h + 1) * p.g);
      for (auto method : {InferenceMethod::BinarySearch, InferenceMethod::Bisecting}) {
        TrainConfig cfg;
        cfg.inference = method;
        cfg.loss = BiCriteriaLoss::slack();
        const auto r = infer(m, ex, cfg);
        CHECK(r.value <= best + 1e-12);
        CHECK(r.oracle_calls >= 1);
      }
    }
  }

  TEST_CASE("multi-label training and inference") {
    MultiLabelGenParams p;
    p.num_examples = 150;
    p.num_labels = 5;
    p.feature_dim = 10;
    const auto ds = generate_multilabel(p);
    for (auto [method, loss] : {std::pair{InferenceMethod::MarginArgmax, BiCriteriaLoss::margin()},
                                std::pair{InferenceMethod::ConvexHull, BiCriteriaLoss::microf1()},
                                std::pair{InferenceMethod::Angular, BiCriteriaLoss::slack()},
                                std::pair{InferenceMethod::ConvexHull, BiCriteriaLoss::probloss()}}) {
      TrainConfig cfg;
      cfg.inference = method;
      cfg.loss = loss;
      cfg.epochs = 30;
      cfg.learning_rate = 0.1;
      cfg.reg_c = 1e-4;
      const auto m = sgd_train(ds, cfg);
      std::vector<std::vector<int>> pred, gold;
      for (const auto& ex : ds.examples) {
        pred.push_back(predict(m, ex));
        gold.push_back(ex.labels);
      }
      const auto met = evaluate_sets(pred, gold, ds.num_labels);
      INFO(loss.name());
      CHECK(met.micro_f1 >= 0.85);
    }
  }

  TEST_CASE("save, load and predict agree with the in-memory model") {
    const auto ds = small_chains(12, 50, 6, 3, 0.3);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.inference = InferenceMethod::ConvexHull;
    cfg.loss = BiCriteriaLoss::probloss();
    const auto m = sgd_train(ds, cfg);
    const std::string path = "trainer_roundtrip_model.txt";
    save_model(path, m);
    const auto r = load_model(path);
    std::remove(path.c_str());
    CHECK(r.w == m.w);
    for (const auto& ex : ds.examples) CHECK(predict(r, ex) == predict(m, ex));
  }

  TEST_CASE("prediction with zero weights picks state 0 everywhere") {
    const auto ds = small_chains(10, 3, 6, 3);
    const auto m = StructuredModel::zeros(ModelKind::Chain, ds.num_states, ds.feature_dim);
    for (const auto& ex : ds.examples) CHECK(predict(m, ex) == std::vector<int>(ex.states.size(), 0));
  }

  TEST_CASE("evaluation metrics") {
    auto m = evaluate_sets({{1, 2}, {0}}, {{1, 2}, {0}}, 3);
    CHECK(m.accuracy == 1.0);
    CHECK(m.hamming == 0.0);
    CHECK(m.micro_f1 == 1.0);
    CHECK(m.macro_f1 == 1.0);
    m = evaluate_sets({{1}}, {{1, 2}}, 3);
    CHECK(m.micro_f1 == doctest::Approx(2.0 / 3));
    CHECK(m.hamming == doctest::Approx(1.0 / 3));
    CHECK(m.accuracy == 0.0);
    CHECK(evaluate_sets({{0}}, {{1}}, 2).micro_f1 == 0.0);
    try {
      evaluate_sets({{0}}, {{1}, {0}}, 2);
      FAIL("expected LengthMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::LengthMismatch);
    }
    const auto s = evaluate_sequences({{0, 1, 1}}, {{0, 1, 0}}, 2);
    CHECK(s.accuracy == 0.0);
    CHECK(s.hamming == doctest::Approx(1.0 / 3));
  }

  TEST_CASE("inference failures name the example") {
    MultiLabelDataset ds;
    ds.feature_dim = 2;
    ds.num_labels = 20;
    for (int i = 0; i < 3; ++i) ds.examples.push_back({{{{0, 1.0}}}, {0}});
    TrainConfig cfg;
    cfg.inference = InferenceMethod::Angular;
    cfg.loss = BiCriteriaLoss::slack();
    try {
      sgd_train(ds, cfg);
      FAIL("expected InferenceFailure");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InferenceFailure);
      CHECK(std::string(e.what()).find("example") != std::string::npos);
    }
  }

  TEST_CASE("configuration names") {
    CHECK(inference_from_name("hull") == InferenceMethod::ConvexHull);
    CHECK(inference_from_name("angular") == InferenceMethod::Angular);
    CHECK(inference_from_name("bisect") == InferenceMethod::Bisecting);
    CHECK_THROWS_AS(inference_from_name("magic"), Error);
  }
}
