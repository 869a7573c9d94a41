#pragma once

#include <optional>
#include <vector>

#include "structsvm/geometry.hpp"

namespace structsvm {

// Closed half-plane a*h + b*g <= c.
struct HalfPlane {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

// Intersection of half-planes; an empty list is the whole plane.
using ConvexRegion = std::vector<HalfPlane>;

// Open axis-aligned rectangle (h_lo, h_hi) x (g_lo, g_hi).
struct Rect {
  double h_lo, h_hi, g_lo, g_hi;
  bool contains(double h, double g) const { return h > h_lo && h < h_hi && g > g_lo && g < g_hi; }
};

// Answers constrained lambda-oracle queries while keeping a region of points that would
// beat every revealed label without contradicting any earlier answer.
class AdversarialLabelStream {
 public:
  explicit AdversarialLabelStream(int num_labels);

  // Returns the revealed label for the query, or nothing ("no label in the region").
  std::optional<LabelPoint> query(double lam, const ConvexRegion& region);

  // The hidden optimum, available once num_labels - 1 queries were answered.
  LabelPoint final_label() const;

  const Rect& rect() const { return rect_; }
  const std::vector<LabelPoint>& revealed() const { return revealed_; }
  int queries() const { return queries_; }

 private:
  int num_labels_;
  int queries_ = 0;
  Rect rect_;
  std::vector<LabelPoint> revealed_;
};

}  // namespace structsvm
