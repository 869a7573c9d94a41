#pragma once

#include <limits>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "structsvm/geometry.hpp"

namespace structsvm {

// Sentinel for lambda = infinity: lexicographic max on (g, h).
inline constexpr double kLambdaInf = std::numeric_limits<double>::infinity();

struct OracleAnswer {
  LabelPoint point;
  // h + lam*g for finite lam; g for the infinity sentinel.
  double oracle_value = 0.0;
};

// Admits labels with lo*h <= g < hi*h (strict_mode: lo*h < g <= hi*h).
// hi = inf is read as "h > 0".
struct SlopeWindow {
  double hi = std::numeric_limits<double>::infinity();
  double lo = 0.0;
  bool strict_mode = false;

  bool admits(double h, double g) const;
};

double lagrangian(const LabelPoint& p, double lam);
// True when a beats b at lam (ties go to the smaller id).
bool oracle_prefers(const LabelPoint& a, const LabelPoint& b, double lam);

class LambdaOracle {
 public:
  virtual ~LambdaOracle() = default;
  virtual OracleAnswer query(double lam) const = 0;
  virtual std::optional<OracleAnswer> query_constrained(double lam, const SlopeWindow& window) const;
  // Best label not in `banned`; throws Exhausted when everything is banned.
  virtual std::optional<OracleAnswer> query_banned(double lam, const std::set<LabelId>& banned) const = 0;
  virtual LabelPoint point_of(LabelId id) const = 0;
  virtual double label_space_size() const = 0;
};

class EnumerationOracle final : public LambdaOracle {
 public:
  explicit EnumerationOracle(std::vector<LabelPoint> points);

  OracleAnswer query(double lam) const override;
  std::optional<OracleAnswer> query_constrained(double lam, const SlopeWindow& window) const override;
  std::optional<OracleAnswer> query_banned(double lam, const std::set<LabelId>& banned) const override;
  LabelPoint point_of(LabelId id) const override;
  double label_space_size() const override { return static_cast<double>(points_.size()); }

  const std::vector<LabelPoint>& points() const { return points_; }

 private:
  std::vector<LabelPoint> points_;
  std::unordered_map<LabelId, std::size_t> index_;
};

struct ChainInstance {
  int length = 0;
  int num_states = 0;
  std::vector<double> unary;     // [pos * S + s]
  std::vector<double> pairwise;  // [(pos * S + prev) * S + s], pos >= 1
  std::vector<int> true_label;

  double potential(const std::vector<int>& y) const;
  int hamming(const std::vector<int>& y) const;
  LabelId encode(const std::vector<int>& y) const;
  std::vector<int> decode(LabelId id) const;
  void validate() const;
};

// Chain backend: h = potential(y) - potential(y_true) + h_offset, g = Hamming.
class ChainOracle final : public LambdaOracle {
 public:
  explicit ChainOracle(ChainInstance inst, double h_offset = 0.0);

  OracleAnswer query(double lam) const override;
  std::optional<OracleAnswer> query_banned(double lam, const std::set<LabelId>& banned) const override;
  LabelPoint point_of(LabelId id) const override;
  double label_space_size() const override;

  const ChainInstance& instance() const { return inst_; }
  LabelPoint point_of_sequence(const std::vector<int>& y) const;
  // Top-k sequences under h + lam*g (k-best Viterbi), best first.
  std::vector<std::vector<int>> k_best(double lam, std::size_t k) const;
  // Materializes every label; only for small spaces.
  EnumerationOracle enumerate() const;

 private:
  ChainInstance inst_;
  double h_offset_;
  double true_potential_;
};

enum class MultiLabelConvention { MarginHamming, MicroF1 };

// Flat multi-label backend over per-label scores; ids are bit masks (at most 63 labels).
// MarginHamming: h = sum_{y} s - sum_{y_true} s + h_offset, g = |y xor y_true|.
// MicroF1: h = |y xor y_true| + sum_{y} s - sum_{y_true} s, g = -(|y| + |y_true|).
class MultiLabelOracle final : public LambdaOracle {
 public:
  MultiLabelOracle(std::vector<double> scores, std::vector<int> truth, MultiLabelConvention conv,
                   double h_offset = 0.0);

  OracleAnswer query(double lam) const override;
  std::optional<OracleAnswer> query_banned(double lam, const std::set<LabelId>& banned) const override;
  LabelPoint point_of(LabelId id) const override;
  double label_space_size() const override;

  static std::vector<int> labels_of(LabelId id);
  static LabelId id_of(const std::vector<int>& labels);

 private:
  std::vector<double> scores_;
  LabelId truth_mask_ = 0;
  MultiLabelConvention conv_;
  double h_offset_;
};

// A = (eps, G), B = (H, eps), C = (H/2, G/2) as (h, g); ids 0, 1, 2.
EnumerationOracle three_label_hard_instance(double H_hat, double G_hat, double eps);

// A = (2, 4), B = (4, 2), C = (3 + eps, 3) as (h, g); ids 0, 1, 2.
EnumerationOracle oscillation_game_instance(double eps = 0.01);

}  // namespace structsvm
