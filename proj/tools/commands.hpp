#pragma once

#include <cstdint>
#include <string>

namespace structsvm::cli {

// Exit statuses.
constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kIo = 2;
constexpr int kConfig = 3;
constexpr int kUsage = 4;

struct TrainOptions {
  std::string kind = "chain";  // chain, multilabel, hier
  std::string data;
  std::string hierarchy;
  std::string out = "model.txt";
  std::string loss = "margin";
  std::string infer = "margin";
  std::string method = "nhsvm";
  double alpha = 1.0;
  double beta = 1.0;
  double scale = 1.0;
  double c = 1e-3;
  double lr = 0.01;
  double decay = 0.0;
  double rho = 2.0;
  bool normalized = false;
  int period = 0;
  int epochs = 10;
  std::uint64_t seed = 1;
  bool cold = false;
};

struct PredictOptions {
  std::string model;
  std::string data;
  std::string hierarchy;
  std::string out;  // empty: standard output
};

struct CompareOptions {
  std::string stream = "random";  // random, hard, chain
  int instances = 200;
  int points = 50;
  int length = 6;
  std::uint64_t seed = 1;
  std::string out;
};

struct TheoryOptions {
  std::string suite = "all";
  int iters = 0;  // 0: per-suite default
  std::uint64_t seed = 1;
};

struct GenOptions {
  std::string hier;  // unbalanced, balanced
  bool chain = false;
  bool multilabel = false;
  int n = 200;
  int depth = 4;
  int d = 20;
  int length = 8;
  int states = 4;
  int vocab = 5;
  int labels = 6;
  double noise = 0.0;
  double stickiness = 0.6;
  double threshold = 0.3;
  std::uint64_t seed = 1;
  std::string out = "synthetic";
};

int cmd_train(const TrainOptions& o);
int cmd_predict(const PredictOptions& o);
int cmd_eval(const PredictOptions& o);
int cmd_compare_oracles(const CompareOptions& o);
int cmd_theory_check(const TheoryOptions& o);
int cmd_gen(const GenOptions& o);

}  // namespace structsvm::cli
