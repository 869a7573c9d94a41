#include "structsvm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "structsvm/error.hpp"

namespace structsvm {

double slope(const LabelPoint& p, const LabelPoint& q) {
  if (p.g == q.g) throw Error(ErrorCode::DegenerateSegment, "slope of a segment with equal g");
  return (p.h - q.h) / (p.g - q.g);
}

double ray_slope(double h, double g) { return g / h; }

namespace {

// Cross product of (b - a) x (c - a) in the (g, h) plane.
double cross(const LabelPoint& a, const LabelPoint& b, const LabelPoint& c) {
  return (b.g - a.g) * (c.h - a.h) - (b.h - a.h) * (c.g - a.g);
}

bool collinear(const LabelPoint& a, const LabelPoint& b, const LabelPoint& c) {
  const double scale = std::max({1.0, std::abs(a.g), std::abs(a.h), std::abs(b.g), std::abs(b.h), std::abs(c.g),
                                 std::abs(c.h)});
  return std::abs(cross(a, b, c)) <= 1e-12 * scale * scale;
}

}  // namespace

void HullState::insert(const LabelPoint& point) {
  if (seen_.count(point.id)) throw Error(ErrorCode::DuplicateLabel, "label already in hull state");
  seen_.insert(point.id);
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), point.g,
                             [](const LabelPoint& v, double g) { return v.g < g; });
  if (it != vertices_.end() && it->g == point.g) {
    // Equal g: only the higher point can be an upper-hull vertex.
    if (point.h > it->h) *it = point;
    return;
  }
  std::size_t pos = static_cast<std::size_t>(it - vertices_.begin());
  vertices_.insert(it, point);
  // Drop an older middle point that became collinear with its neighbours.
  auto drop_if_middle = [&](std::size_t mid) {
    if (mid == 0 || mid + 1 >= vertices_.size() || mid == pos) return false;
    if (!collinear(vertices_[mid - 1], vertices_[mid], vertices_[mid + 1])) return false;
    vertices_.erase(vertices_.begin() + static_cast<std::ptrdiff_t>(mid));
    if (mid < pos) --pos;
    return true;
  };
  if (pos > 0) drop_if_middle(pos - 1);
  drop_if_middle(pos + 1);
}

std::size_t HullState::incumbent(const BiCriteriaLoss& loss) const {
  std::size_t best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const double v = loss.value(vertices_[i].h, vertices_[i].g);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  return best;
}

HullState insert_sorted(HullState state, const LabelPoint& point) {
  state.insert(point);
  return state;
}

SegmentMax golden_max_on_segment(const BiCriteriaLoss& loss, const Segment& s, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidParams, "golden search tolerance must be > 0");
  auto f = [&](double t) {
    const double v = loss.value((1 - t) * s.p.h + t * s.q.h, (1 - t) * s.p.g + t * s.q.g);
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteLoss, "non-finite loss on segment");
    return v;
  };
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 1.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  SegmentMax best{0.5 * (a + b), f(0.5 * (a + b))};
  const double f0 = f(0.0), f1 = f(1.0);
  if (f0 >= best.value) best = {0.0, f0};
  if (f1 > best.value) best = {1.0, f1};
  return best;
}

double contour_tangent_slope(const BiCriteriaLoss& loss, const LabelPoint& at) {
  const Grad gr = loss.grad(at.h, at.g);
  if (gr.dh == 0.0 && gr.dg == 0.0) throw Error(ErrorCode::ZeroGradient, "both partials vanish");
  if (gr.dh == 0.0) return gr.dg > 0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  return -gr.dg / gr.dh;
}

std::vector<LabelPoint> upper_right_hull(std::vector<LabelPoint> points) {
  std::sort(points.begin(), points.end(), [](const LabelPoint& a, const LabelPoint& b) {
    if (a.g != b.g) return a.g < b.g;
    if (a.h != b.h) return a.h > b.h;
    return a.id < b.id;
  });
  // Upper hull over g with monotone chain, keeping only strict turns.
  std::vector<LabelPoint> hull;
  for (const auto& p : points) {
    if (!hull.empty() && hull.back().g == p.g) continue;
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) >= 0) hull.pop_back();
    hull.push_back(p);
  }
  // Keep the part from the max-h vertex rightwards (edges with non-positive slope).
  std::size_t start = 0;
  for (std::size_t i = 1; i < hull.size(); ++i) {
    if (hull[i].h >= hull[start].h) start = i;
  }
  return {hull.begin() + static_cast<std::ptrdiff_t>(start), hull.end()};
}

}  // namespace structsvm
