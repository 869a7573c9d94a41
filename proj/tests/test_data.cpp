#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <random>

#include "structsvm/data.hpp"
#include "structsvm/error.hpp"
#include "structsvm/model.hpp"
#include "structsvm/synthetic.hpp"

using namespace structsvm;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(std::string p, const std::string& content = "") : path(std::move(p)) {
    if (!content.empty()) std::ofstream(path) << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

template <class F>
Error caught(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  FAIL("no error raised");
  return Error(ErrorCode::Io, "");
}

}  // namespace

TEST_SUITE("data") {
  TEST_CASE("tokens") {
    const auto x = parse_token("3:0.5,7:-2", 10);
    REQUIRE(x.entries.size() == 2);
    CHECK(x.entries[1] == std::pair<int, double>{7, -2.0});
    CHECK(format_token(x) == "3:0.5,7:-2");
    const auto w = parse_token("hello", 97);
    REQUIRE(w.entries.size() == 1);
    CHECK(w.entries[0].first == static_cast<int>(fnv1a("hello") % 97));
    CHECK(fnv1a("") == 14695981039346656037ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(caught([] { parse_token("12:1", 10); }).code() == ErrorCode::Parse);
    CHECK(caught([] { parse_token("1:x", 10); }).code() == ErrorCode::Parse);
  }

  TEST_CASE("sequence files") {
    PlantedChainParams p;
    p.num_examples = 7;
    p.noise = 0.3;
    const auto ds = generate_planted_chains(p);
    TempFile f("seq_roundtrip.seq");
    write_sequences(f.path, ds);
    const auto r = read_sequences(f.path);
    CHECK(r.feature_dim == ds.feature_dim);
    CHECK(r.num_states == ds.num_states);
    REQUIRE(r.examples.size() == ds.examples.size());
    for (std::size_t i = 0; i < r.examples.size(); ++i) {
      CHECK(r.examples[i].states == ds.examples[i].states);
      for (std::size_t t = 0; t < r.examples[i].tokens.size(); ++t)
        CHECK(r.examples[i].tokens[t].entries == ds.examples[i].tokens[t].entries);
    }

    TempFile words("words.seq", "# a comment line\n#dim 16\nthe\t0\ncat\t1\n\nsat\t2\n");
    const auto w = read_sequences(words.path);
    CHECK(w.num_states == 3);
    CHECK(w.examples.size() == 2);
    CHECK(w.examples[1].tokens[0].entries[0].first == static_cast<int>(fnv1a("sat") % 16));

    TempFile nodim("nodim.seq", "a\t0\n");
    CHECK(caught([&] { read_sequences(nodim.path); }).code() == ErrorCode::Parse);
    TempFile badstate("badstate.seq", "#dim 4\n#states 2\na\t5\n");
    CHECK(caught([&] { read_sequences(badstate.path); }).code() == ErrorCode::Parse);
    const auto missing = caught([] { read_sequences("missing_dir/none.seq"); });
    CHECK(missing.code() == ErrorCode::Io);
    CHECK(std::string(missing.what()).find("missing_dir/none.seq") != std::string::npos);
  }

  TEST_CASE("multi-label files") {
    MultiLabelGenParams p;
    p.num_examples = 9;
    const auto ds = generate_multilabel(p);
    TempFile f("ml_roundtrip.ml");
    write_multilabel(f.path, ds);
    const auto r = read_multilabel(f.path);
    CHECK(r.feature_dim == ds.feature_dim);
    CHECK(r.num_labels == ds.num_labels);
    REQUIRE(r.examples.size() == ds.examples.size());
    for (std::size_t i = 0; i < r.examples.size(); ++i) {
      CHECK(r.examples[i].labels == ds.examples[i].labels);
      CHECK(r.examples[i].x.entries == ds.examples[i].x.entries);
    }
    TempFile empty_set("empty.ml", "#dim 3\n#labels 2\n- 0:1\n1,0 2:0.5\n");
    const auto e = read_multilabel(empty_set.path);
    CHECK(e.examples[0].labels.empty());
    CHECK(e.examples[1].labels == std::vector<int>{0, 1});
    CHECK(caught([] { read_multilabel("nope.ml"); }).code() == ErrorCode::Io);
  }

  TEST_CASE("model files are bit exact") {
    auto m = StructuredModel::zeros(ModelKind::Chain, 3, 5);
    CHECK(m.w.size() == StructuredModel::dimension(ModelKind::Chain, 3, 5));
    CHECK(m.w.size() == 3 * 5 + 9);
    CHECK(StructuredModel::dimension(ModelKind::MultiLabel, 4, 6) == 24);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd(0.0, 1e3);
    for (auto& v : m.w) v = nd(rng) / 7.0;
    m.w[0] = 1e-300;
    m.w[1] = -0.0;
    TempFile f("model_roundtrip.txt");
    save_model(f.path, m);
    const auto r = load_model(f.path);
    CHECK(r.kind == m.kind);
    CHECK(r.num_outputs == 3);
    CHECK(r.feature_dim == 5);
    CHECK(r.w == m.w);

    TempFile bad("bad_model.txt", "structsvm-model v9 chain 1 1\n0\n");
    CHECK(caught([&] { load_model(bad.path); }).code() == ErrorCode::Parse);
    TempFile short_file("short_model.txt", "structsvm-model v1 multilabel 2 2\n0\n1\n");
    CHECK(caught([&] { load_model(short_file.path); }).code() == ErrorCode::Parse);
    CHECK(caught([] { load_model("absent_model.txt"); }).code() == ErrorCode::Io);
    CHECK(caught([] { StructuredModel::zeros(ModelKind::Chain, 0, 3); }).code() == ErrorCode::InvalidParams);
  }
}
