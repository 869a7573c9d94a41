#pragma once

#include <vector>

#include "structsvm/oracle.hpp"

namespace structsvm {

struct HullSearchResult {
  FractionalLabel label;
  double value = 0.0;  // psi at the fractional optimum
  int oracle_calls = 0;
  HullState state;     // discovered hull vertices, reusable as a warm start
};

// Lambda from the incumbent's contour tangent, or from an adjacent edge that crosses it.
double get_lambda(const HullState& state, const BiCriteriaLoss& loss);

// Best of the incumbent vertex and the golden-section maxima of its adjacent edges.
FractionalLabel get_max_fract(const HullState& state, const BiCriteriaLoss& loss, double* value = nullptr);

// Maximizes psi over the convex hull of the label images. A warm start lists label ids whose
// points are re-read from the oracle (the model may have moved since they were found).
HullSearchResult convex_hull_search(const LambdaOracle& oracle, const BiCriteriaLoss& loss,
                                    const std::vector<LabelId>& warm_start = {});

struct RecoveryOptions {
  int max_calls = 64;
};

// Best integral label near a fractional optimum, via the ban-list oracle at the edge's lambda.
LabelPoint integral_recovery(const FractionalLabel& frac, const LambdaOracle& oracle, const BiCriteriaLoss& loss,
                             const RecoveryOptions& options = {}, int* calls = nullptr);

}  // namespace structsvm
