#include <cstdio>
#include <exception>

#include "CLI11.hpp"
#include "commands.hpp"
#include "structsvm/error.hpp"

using namespace structsvm;
using namespace structsvm::cli;

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io:
    case ErrorCode::Parse:
    case ErrorCode::InvalidLabel:
      return kIo;
    case ErrorCode::InvalidParams:
    case ErrorCode::DomainError:
    case ErrorCode::UnsupportedBackend:
    case ErrorCode::UnsupportedDAG:
    case ErrorCode::NotATree:
    case ErrorCode::InvalidNode:
    case ErrorCode::LengthMismatch:
      return kConfig;
    default:
      return kFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured SVM toolkit: bi-criteria losses, lambda-oracle searches, hierarchical SVMs"};
  app.require_subcommand(1);
  int status = kOk;

  TrainOptions tr;
  auto* train = app.add_subcommand("train", "Train a model and print a JSON summary line");
  train->add_option("--kind", tr.kind, "chain, multilabel or hier")->check(CLI::IsMember({"chain", "multilabel", "hier"}));
  train->add_option("--data", tr.data, "Training data file")->required();
  train->add_option("--hierarchy", tr.hierarchy, "Hierarchy edge file (kind hier)");
  train->add_option("--out", tr.out, "Model output path");
  train->add_option("--loss", tr.loss, "margin, slack, genscale, betascale, logloss, probloss, probloss-convex, microf1");
  train->add_option("--alpha", tr.alpha, "genscale alpha");
  train->add_option("--beta", tr.beta, "genscale / betascale beta");
  train->add_option("--scale", tr.scale, "ProbLoss scale");
  train->add_option("--infer", tr.infer, "margin, binary, bisect, angular or hull");
  train->add_option("--method", tr.method, "flat, hsvm, nhsvm or ssvm (kind hier)");
  train->add_option("--rho", tr.rho, "Norm exponent of the alpha program (kind hier)");
  train->add_flag("--normalized", tr.normalized, "Divide margins by the class-attribute distance (nhsvm, ssvm)");
  train->add_option("--period", tr.period, "Epochs between alpha updates for ssvm");
  train->add_option("--epochs", tr.epochs, "Passes over the data");
  train->add_option("--c", tr.c, "Regularization constant");
  train->add_option("--lr", tr.lr, "Learning rate");
  train->add_option("--decay", tr.decay, "lr / (1 + decay * t) schedule");
  train->add_option("--seed", tr.seed, "Shuffling seed");
  train->add_flag("--cold", tr.cold, "Disable hull warm starts");
  train->callback([&] { status = cmd_train(tr); });

  PredictOptions pr;
  auto* predict = app.add_subcommand("predict", "Write one prediction per example");
  predict->add_option("--model", pr.model, "Model file")->required();
  predict->add_option("--data", pr.data, "Data file")->required();
  predict->add_option("--hierarchy", pr.hierarchy, "Hierarchy edge file for hierarchical models");
  predict->add_option("--out", pr.out, "Output path (default: standard output)");
  predict->callback([&] { status = cmd_predict(pr); });

  PredictOptions ev;
  auto* eval = app.add_subcommand("eval", "Print metrics of a model on a data file as JSON");
  eval->add_option("--model", ev.model, "Model file")->required();
  eval->add_option("--data", ev.data, "Data file")->required();
  eval->add_option("--hierarchy", ev.hierarchy, "Hierarchy edge file for hierarchical models");
  eval->callback([&] { status = cmd_eval(ev); });

  CompareOptions co;
  auto* compare = app.add_subcommand("compare-oracles", "CSV comparison of the Phi searches on one instance stream");
  compare->add_option("--stream", co.stream, "random, hard or chain")->check(CLI::IsMember({"random", "hard", "chain"}));
  compare->add_option("--instances", co.instances, "Number of instances")->check(CLI::PositiveNumber);
  compare->add_option("--points", co.points, "Labels per random instance")->check(CLI::PositiveNumber);
  compare->add_option("--length", co.length, "Chain length for the chain stream")->check(CLI::Range(1, 16));
  compare->add_option("--seed", co.seed, "Instance seed");
  compare->add_option("--out", co.out, "CSV path (default: standard output)");
  compare->callback([&] { status = cmd_compare_oracles(co); });

  TheoryOptions th;
  auto* theory = app.add_subcommand("theory-check", "Run named property suites; exit 0 iff all pass");
  theory->add_option("--suite", th.suite,
                     "all, monotonicity, k-bound, angular-subopt, hull-calls, alpha-optimality or invariance");
  theory->add_option("--iters", th.iters, "Suite size (iterations for angular-subopt)")->check(CLI::NonNegativeNumber);
  theory->add_option("--seed", th.seed, "Seed");
  theory->callback([&] { status = cmd_theory_check(th); });

  GenOptions ge;
  auto* gen = app.add_subcommand("gen", "Write synthetic datasets");
  auto* hier_opt = gen->add_option("--hier", ge.hier, "unbalanced or balanced hierarchy data")
                       ->check(CLI::IsMember({"unbalanced", "balanced"}));
  auto* chain_opt = gen->add_flag("--chain", ge.chain, "Planted chain sequences");
  auto* ml_opt = gen->add_flag("--multilabel", ge.multilabel, "Planted multi-label data");
  hier_opt->excludes(chain_opt)->excludes(ml_opt);
  chain_opt->excludes(ml_opt);
  gen->add_option("--n", ge.n, "Number of examples")->check(CLI::PositiveNumber);
  gen->add_option("--depth", ge.depth, "Hierarchy depth")->check(CLI::PositiveNumber);
  gen->add_option("--d", ge.d, "Feature dimension")->check(CLI::PositiveNumber);
  gen->add_option("--length", ge.length, "Sequence length")->check(CLI::PositiveNumber);
  gen->add_option("--states", ge.states, "Number of states")->check(CLI::PositiveNumber);
  gen->add_option("--vocab", ge.vocab, "Vocabulary per state")->check(CLI::PositiveNumber);
  gen->add_option("--labels", ge.labels, "Number of labels")->check(CLI::PositiveNumber);
  gen->add_option("--noise", ge.noise, "Token noise rate")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--stickiness", ge.stickiness, "Chance of keeping the state")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--threshold", ge.threshold, "Label score threshold");
  gen->add_option("--seed", ge.seed, "Seed");
  gen->add_option("--out", ge.out, "Output path prefix");
  gen->callback([&] { status = cmd_gen(ge); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return status;
}
