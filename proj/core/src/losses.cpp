#include "structsvm/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "structsvm/error.hpp"

namespace structsvm {

namespace {

constexpr double kLn2 = std::numbers::ln2;

double softplus(double h) { return h > 0 ? h + std::log1p(std::exp(-h)) : std::log1p(std::exp(h)); }

double sigmoid(double h) {
  if (h >= 0) return 1.0 / (1.0 + std::exp(-h));
  const double e = std::exp(h);
  return e / (1.0 + e);
}

double probloss_variance(double g, double scale) { return scale * 2.0 * g / std::numbers::pi; }

double probloss_value(double h, double g, double scale) {
  if (g == 0.0) return 0.0;
  return 2.0 * g * normal_cdf(h, 0.0, probloss_variance(g, scale));
}

Grad probloss_grad(double h, double g, double scale) {
  if (g == 0.0) return {0.0, h > 0 ? 2.0 : (h < 0 ? 0.0 : 1.0)};
  const double sigma = std::sqrt(probloss_variance(g, scale));
  const double z = h / sigma;
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  return {2.0 * g * pdf / sigma, 2.0 * cdf - pdf * z};
}

}  // namespace

double normal_cdf(double x, double mean, double variance) {
  return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

double normal_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return std::exp(-d * d / (2.0 * variance)) / std::sqrt(2.0 * std::numbers::pi * variance);
}

BiCriteriaLoss BiCriteriaLoss::margin() { return {LossFamily::MarginRescaling, 1.0, 0.0, 1.0}; }
BiCriteriaLoss BiCriteriaLoss::slack() { return {LossFamily::SlackRescaling, 1.0, 1.0, 1.0}; }

BiCriteriaLoss BiCriteriaLoss::generalized(double alpha, double beta) {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || beta < 0.0 || alpha < beta || alpha > beta + 1.0) {
    throw Error(ErrorCode::InvalidParams,
                "generalized scaling needs 0 <= beta <= alpha <= beta + 1 (got alpha=" + std::to_string(alpha) +
                    ", beta=" + std::to_string(beta) + ")");
  }
  return {LossFamily::GeneralizedScaling, alpha, beta, 1.0};
}

BiCriteriaLoss BiCriteriaLoss::beta_scaling(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw Error(ErrorCode::InvalidParams, "beta scaling needs 0 <= beta <= 1 (got " + std::to_string(beta) + ")");
  }
  return {LossFamily::BetaScaling, 1.0, beta, 1.0};
}

BiCriteriaLoss BiCriteriaLoss::log_loss() { return {LossFamily::LossScaledLog, 1.0, 1.0, 1.0}; }

BiCriteriaLoss BiCriteriaLoss::probloss(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw Error(ErrorCode::InvalidParams, "probloss scale must be > 0");
  return {LossFamily::ProbLoss, 1.0, 1.0, scale};
}

BiCriteriaLoss BiCriteriaLoss::probloss_convex(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw Error(ErrorCode::InvalidParams, "probloss scale must be > 0");
  return {LossFamily::ProbLossConvexExt, 1.0, 1.0, scale};
}

BiCriteriaLoss BiCriteriaLoss::microf1() { return {LossFamily::MicroF1Surrogate, -1.0, 0.0, 1.0}; }

BiCriteriaLoss BiCriteriaLoss::from_name(const std::string& name, double alpha, double beta, double scale) {
  if (name == "margin") return margin();
  if (name == "slack") return slack();
  if (name == "genscale") return generalized(alpha, beta);
  if (name == "betascale") return beta_scaling(beta);
  if (name == "logloss") return log_loss();
  if (name == "probloss") return probloss(scale);
  if (name == "probloss-convex") return probloss_convex(scale);
  if (name == "microf1") return microf1();
  throw Error(ErrorCode::InvalidParams, "unknown loss '" + name + "'");
}

std::string BiCriteriaLoss::name() const {
  switch (family_) {
    case LossFamily::MarginRescaling: return "margin";
    case LossFamily::SlackRescaling: return "slack";
    case LossFamily::GeneralizedScaling: return "genscale";
    case LossFamily::BetaScaling: return "betascale";
    case LossFamily::LossScaledLog: return "logloss";
    case LossFamily::ProbLoss: return "probloss";
    case LossFamily::ProbLossConvexExt: return "probloss-convex";
    case LossFamily::MicroF1Surrogate: return "microf1";
  }
  return "unknown";
}

void BiCriteriaLoss::check_domain(double g) const {
  if (family_ == LossFamily::MarginRescaling) return;
  if (family_ == LossFamily::MicroF1Surrogate) {
    if (!(g < 0.0)) throw Error(ErrorCode::DomainError, "micro-F1 surrogate needs g < 0");
    return;
  }
  if (!(g >= 0.0)) throw Error(ErrorCode::DomainError, name() + " needs g >= 0");
}

double BiCriteriaLoss::value(double h, double g) const {
  check_domain(g);
  switch (family_) {
    case LossFamily::MarginRescaling: return h + g;
    case LossFamily::SlackRescaling: return (h + 1.0) * g;
    case LossFamily::GeneralizedScaling: return h * std::pow(g, beta_) + std::pow(g, alpha_);
    case LossFamily::BetaScaling: return h * std::pow(g, beta_) + g;
    case LossFamily::LossScaledLog: return g * softplus(h) / kLn2;
    case LossFamily::ProbLoss: return probloss_value(h, g, scale_);
    case LossFamily::ProbLossConvexExt:
      if (h > 0.0) return g + std::sqrt(g / scale_) * h;
      return probloss_value(h, g, scale_);
    case LossFamily::MicroF1Surrogate: return h / (-g);
  }
  return 0.0;
}

Grad BiCriteriaLoss::grad(double h, double g) const {
  check_domain(g);
  switch (family_) {
    case LossFamily::MarginRescaling: return {1.0, 1.0};
    case LossFamily::SlackRescaling: return {g, h + 1.0};
    case LossFamily::GeneralizedScaling:
      return {std::pow(g, beta_), beta_ * h * std::pow(g, beta_ - 1.0) + alpha_ * std::pow(g, alpha_ - 1.0)};
    case LossFamily::BetaScaling: return {std::pow(g, beta_), beta_ * h * std::pow(g, beta_ - 1.0) + 1.0};
    case LossFamily::LossScaledLog: return {g * sigmoid(h) / kLn2, softplus(h) / kLn2};
    case LossFamily::ProbLoss: return probloss_grad(h, g, scale_);
    case LossFamily::ProbLossConvexExt:
      if (h > 0.0) return {std::sqrt(g / scale_), 1.0 + h / (2.0 * std::sqrt(g * scale_))};
      return probloss_grad(h, g, scale_);
    case LossFamily::MicroF1Surrogate: return {1.0 / (-g), h / (g * g)};
  }
  return {};
}

double probloss_convex_ext(double h, double g) {
  if (!(g > 0.0)) throw Error(ErrorCode::DomainError, "convex ProbLoss extension needs g > 0");
  return BiCriteriaLoss::probloss_convex().value(h, g);
}

FactorPair microf1_factors(const std::vector<int>& y, const std::vector<int>& y_true, double margin) {
  if (y_true.empty()) throw Error(ErrorCode::EmptyTruth, "micro-F1 factors need a nonempty true label set");
  const std::set<int> a(y.begin(), y.end());
  const std::set<int> b(y_true.begin(), y_true.end());
  std::vector<int> diff;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(diff));
  FactorPair f;
  f.h = static_cast<double>(diff.size()) + margin;
  f.g = -static_cast<double>(a.size() + b.size());
  f.convention = FactorConvention::MicroF1;
  return f;
}

PropertyReport check_bicriteria_axioms(const BiCriteriaLoss& loss, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const bool neg = loss.negative_g();
  std::uniform_real_distribution<double> hd(neg ? 0.0 : -3.0, 3.0);
  std::uniform_real_distribution<double> gd(neg ? -10.0 : 1e-3, neg ? -0.1 : 5.0);
  auto tol = [](double v) { return 1e-9 * (1.0 + std::abs(v)); };

  struct Pt {
    double h, g, v;
  };
  auto draw_in_k0 = [&]() {
    for (;;) {
      const double h = hd(rng), g = gd(rng);
      const double v = loss.value(h, g);
      if (v >= 0.0) return Pt{h, g, v};
    }
  };

  PropertyReport rep;
  rep.samples = samples;
  const double step = 1e-3;
  for (int i = 0; i < samples; ++i) {
    const Pt p = draw_in_k0();
    if (loss.value(p.h + step, p.g) < p.v - tol(p.v)) ++rep.monotone_violations;
    const double g2 = p.g + step;
    const bool g2_ok = neg ? g2 < 0.0 : true;
    if (g2_ok) {
      if (loss.value(p.h, g2) < p.v - tol(p.v)) ++rep.monotone_violations;
      // Deep in the tail the value underflows to 0 and strictness is not representable.
      if (p.v > 0.0 && !(loss.value(p.h + step, g2) > p.v)) ++rep.diagonal_violations;
    }
    const Pt q = draw_in_k0();
    const double level = std::min(p.v, q.v);
    for (double t : {0.25, 0.5, 0.75}) {
      const double v = loss.value((1 - t) * p.h + t * q.h, (1 - t) * p.g + t * q.g);
      if (v < level - tol(level)) {
        ++rep.quasiconcavity_violations;
        break;
      }
    }
  }
  return rep;
}

}  // namespace structsvm
