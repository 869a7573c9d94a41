#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace structsvm {

enum class LossFamily {
  MarginRescaling,
  SlackRescaling,
  GeneralizedScaling,
  BetaScaling,
  LossScaledLog,
  ProbLoss,
  ProbLossConvexExt,
  MicroF1Surrogate,
};

struct Grad {
  double dh = 0.0;
  double dg = 0.0;
};

// A psi(h, g) family with its parameters. Immutable once built.
class BiCriteriaLoss {
 public:
  static BiCriteriaLoss margin();
  static BiCriteriaLoss slack();
  // Valid when 0 <= beta <= alpha <= beta + 1.
  static BiCriteriaLoss generalized(double alpha, double beta);
  static BiCriteriaLoss beta_scaling(double beta);
  static BiCriteriaLoss log_loss();
  static BiCriteriaLoss probloss(double scale = 1.0);
  static BiCriteriaLoss probloss_convex(double scale = 1.0);
  static BiCriteriaLoss microf1();

  // Names: margin, slack, genscale, betascale, logloss, probloss, probloss-convex, microf1.
  static BiCriteriaLoss from_name(const std::string& name, double alpha = 1.0, double beta = 1.0,
                                  double scale = 1.0);

  LossFamily family() const { return family_; }
  std::string name() const;
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double scale() const { return scale_; }
  // True when the family lives on g < 0 (Micro-F1 factors).
  bool negative_g() const { return family_ == LossFamily::MicroF1Surrogate; }

  double value(double h, double g) const;
  Grad grad(double h, double g) const;

 private:
  BiCriteriaLoss(LossFamily f, double a, double b, double s) : family_(f), alpha_(a), beta_(b), scale_(s) {}
  void check_domain(double g) const;

  LossFamily family_;
  double alpha_;
  double beta_;
  double scale_;
};

double normal_cdf(double x, double mean, double variance);
double normal_pdf(double x, double mean, double variance);

double probloss_convex_ext(double h, double g);

enum class FactorConvention { MarginHamming, MicroF1 };

struct FactorPair {
  double h = 0.0;
  double g = 0.0;
  FactorConvention convention = FactorConvention::MarginHamming;
};

FactorPair microf1_factors(const std::vector<int>& y, const std::vector<int>& y_true, double margin);

struct PropertyReport {
  int samples = 0;
  int monotone_violations = 0;
  int quasiconcavity_violations = 0;
  int diagonal_violations = 0;
  bool ok() const { return monotone_violations == 0 && quasiconcavity_violations == 0 && diagonal_violations == 0; }
};

PropertyReport check_bicriteria_axioms(const BiCriteriaLoss& loss, int samples, std::uint64_t seed);

}  // namespace structsvm
