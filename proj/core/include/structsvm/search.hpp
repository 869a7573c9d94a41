#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "structsvm/oracle.hpp"

namespace structsvm {

// Searches for argmax of Phi(y) = h(y) * g(y) over labels with h, g > 0.
struct SearchResult {
  std::optional<LabelPoint> best;  // empty when no label has Phi > 0
  double best_value = 0.0;
  int oracle_calls = 0;
  std::optional<double> certificate;  // upper bound on Phi*
  std::vector<double> trace;          // best_value after each oracle call
};

double phi(const LabelPoint& p);

// Phi* <= K^2 / (4 lam).
double suboptimality_certificate(double K, double lam);

SearchResult binary_search_sgd(const LambdaOracle& oracle, double lam_lo, double lam_hi, double tol = 1e-6);

SearchResult bisecting_search(const LambdaOracle& oracle, double lam0, int max_iters = 100);

struct AngleTask {
  double slope_hi;
  double slope_lo;
  int strict_flag;  // 1: lo <= g/h < hi, 0: lo < g/h <= hi
  int depth;
  double lam;    // inherited lambda, used while slope_lo == 0
  double bound;  // upper bound on Phi inside the angle
};

enum class QueueDiscipline { Fifo, Priority };

struct AngularOptions {
  QueueDiscipline queue = QueueDiscipline::Fifo;
  std::vector<LabelPoint> label_cache;  // seeds the incumbent; empty by default
  double tie_tol = 1e-12;
};

SearchResult angular_search(const LambdaOracle& oracle, double lam0, int max_iters,
                            std::optional<std::pair<double, double>> init_window = std::nullopt,
                            const AngularOptions& options = {});

// Start values of the epsilon-optimal variant: lam0 = G/H, window (G^2/phi_lb, phi_lb/H^2).
struct AngularInit {
  double lam0;
  double slope_hi;
  double slope_lo;
};
AngularInit angular_guaranteed_init(double H_hat, double G_hat, std::optional<double> phi_lower = std::nullopt);

}  // namespace structsvm
