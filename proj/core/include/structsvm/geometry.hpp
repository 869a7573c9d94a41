#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "structsvm/losses.hpp"

namespace structsvm {

using LabelId = std::uint64_t;

struct LabelPoint {
  LabelId id = 0;
  double h = 0.0;
  double g = 0.0;
};

struct Segment {
  LabelPoint p;
  LabelPoint q;
};

// Hull-edge slope dh/dg.
double slope(const LabelPoint& p, const LabelPoint& q);

// Angular slope g/h of a point seen from the origin.
double ray_slope(double h, double g);

class HullState {
 public:
  HullState() = default;
  // Inserts keeping vertices strictly increasing in g. Throws DuplicateLabel on a seen id.
  void insert(const LabelPoint& point);
  bool contains(LabelId id) const { return seen_.count(id) != 0; }
  bool empty() const { return vertices_.empty(); }
  const std::vector<LabelPoint>& vertices() const { return vertices_; }
  const std::set<LabelId>& seen_ids() const { return seen_; }
  // Index of the max-psi vertex; ties go to the lower index.
  std::size_t incumbent(const BiCriteriaLoss& loss) const;

 private:
  std::vector<LabelPoint> vertices_;
  std::set<LabelId> seen_;
};

HullState insert_sorted(HullState state, const LabelPoint& point);

struct SegmentMax {
  double t = 0.0;
  double value = 0.0;
};

// Golden-section maximization of psi((1-t)p + t q) over t in [0, 1].
SegmentMax golden_max_on_segment(const BiCriteriaLoss& loss, const Segment& s, double tol = 1e-9);

// Contour tangent slope dh/dg = -psi_g / psi_h. Returns -inf when psi_h = 0 < psi_g.
double contour_tangent_slope(const BiCriteriaLoss& loss, const LabelPoint& at);

// A point of the hull of label images: one vertex, or a convex combination of two.
struct FractionalLabel {
  LabelPoint first;
  std::optional<LabelPoint> second;
  double t = 0.0;  // weight on `second`

  bool integral() const { return !second.has_value(); }
  double h() const { return second ? (1 - t) * first.h + t * second->h : first.h; }
  double g() const { return second ? (1 - t) * first.g + t * second->g : first.g; }
};

// Upper-right hull of a point set: vertices that maximize h + lambda*g for some lambda in [0, inf],
// sorted by increasing g.
std::vector<LabelPoint> upper_right_hull(std::vector<LabelPoint> points);

}  // namespace structsvm
