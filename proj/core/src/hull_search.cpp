#include "structsvm/hull_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "structsvm/error.hpp"

namespace structsvm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool beyond_tangent(const LabelPoint& n, const LabelPoint& y, double lam) {
  if (std::isinf(lam)) return n.g > y.g;
  return n.h + lam * n.g > y.h + lam * y.g;
}

}  // namespace

double get_lambda(const HullState& state, const BiCriteriaLoss& loss) {
  if (state.empty()) throw Error(ErrorCode::InvalidParams, "get_lambda on an empty hull state");
  const auto& v = state.vertices();
  const std::size_t i = state.incumbent(loss);
  const LabelPoint& y = v[i];
  const double tangent = -contour_tangent_slope(loss, y);
  double lam = tangent;
  if (i > 0 && beyond_tangent(v[i - 1], y, tangent)) lam = -slope(v[i - 1], y);
  if (i + 1 < v.size() && beyond_tangent(v[i + 1], y, tangent)) lam = -slope(y, v[i + 1]);
  return std::max(lam, 0.0);
}

FractionalLabel get_max_fract(const HullState& state, const BiCriteriaLoss& loss, double* value) {
  if (state.empty()) throw Error(ErrorCode::InvalidParams, "get_max_fract on an empty hull state");
  const auto& v = state.vertices();
  const std::size_t i = state.incumbent(loss);
  FractionalLabel best{v[i], std::nullopt, 0.0};
  double best_v = loss.value(v[i].h, v[i].g);
  auto try_edge = [&](const LabelPoint& nbr) {
    const SegmentMax m = golden_max_on_segment(loss, {v[i], nbr});
    if (m.value > best_v && m.t > 0.0) {
      best_v = m.value;
      if (m.t >= 1.0) {
        best = {nbr, std::nullopt, 0.0};
      } else {
        best = {v[i], nbr, m.t};
      }
    }
  };
  if (i > 0) try_edge(v[i - 1]);
  if (i + 1 < v.size()) try_edge(v[i + 1]);
  if (value) *value = best_v;
  return best;
}

HullSearchResult convex_hull_search(const LambdaOracle& oracle, const BiCriteriaLoss& loss,
                                    const std::vector<LabelId>& warm_start) {
  HullSearchResult r;
  double lam = kInf;
  if (!warm_start.empty()) {
    std::vector<LabelPoint> pts;
    std::set<LabelId> ids;
    for (LabelId id : warm_start)
      if (ids.insert(id).second) pts.push_back(oracle.point_of(id));
    for (const auto& p : upper_right_hull(std::move(pts))) r.state.insert(p);
    lam = get_lambda(r.state, loss);
  }
  // Each new answer is a fresh hull vertex, so the loop is bounded by the vertex count.
  for (;;) {
    const OracleAnswer a = oracle.query(lam);
    ++r.oracle_calls;
    if (r.state.contains(a.point.id)) break;
    r.state.insert(a.point);
    lam = get_lambda(r.state, loss);
  }
  r.label = get_max_fract(r.state, loss, &r.value);
  return r;
}

namespace {

// Upper bound of psi over {h <= K0, g <= g_max, h + lam*g <= Kn}.
double region_bound(const BiCriteriaLoss& loss, double K0, double g_max, double lam, double Kn) {
  if (lam <= 0.0) return loss.value(std::min(K0, Kn), g_max);
  const double g1 = (Kn - K0) / lam;
  if (g1 >= g_max) return loss.value(K0, g_max);
  LabelPoint c1{0, K0, g1};
  if (!loss.negative_g() && loss.family() != LossFamily::MarginRescaling && g1 < 0.0) c1 = {0, Kn, 0.0};
  const LabelPoint c2{0, Kn - lam * g_max, g_max};
  return golden_max_on_segment(loss, {c1, c2}).value;
}

}  // namespace

LabelPoint integral_recovery(const FractionalLabel& frac, const LambdaOracle& oracle, const BiCriteriaLoss& loss,
                             const RecoveryOptions& options, int* calls) {
  int n = 0;
  if (calls) *calls = 0;
  if (frac.integral()) return frac.first;
  const LabelPoint p = frac.first, q = *frac.second;
  const double lam = std::max(0.0, -slope(p, q));
  LabelPoint best = loss.value(p.h, p.g) >= loss.value(q.h, q.g) ? p : q;
  double best_v = loss.value(best.h, best.g);
  auto consider = [&](const LabelPoint& y) {
    const double v = loss.value(y.h, y.g);
    if (v > best_v || (v == best_v && y.id < best.id)) {
      best = y;
      best_v = v;
    }
  };
  const OracleAnswer top_h = oracle.query(0.0);
  const OracleAnswer top_g = oracle.query(kInf);
  n += 2;
  consider(top_h.point);
  consider(top_g.point);
  const double K0 = top_h.point.h, g_max = top_g.point.g;

  std::set<LabelId> banned{p.id, q.id};
  while (n < options.max_calls) {
    std::optional<OracleAnswer> a;
    try {
      a = oracle.query_banned(lam, banned);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Exhausted) break;
      throw;
    }
    ++n;
    if (!a) break;
    banned.insert(a->point.id);
    consider(a->point);
    const double bound = region_bound(loss, K0, g_max, lam, a->oracle_value);
    if (best_v >= bound - 1e-12 * (1.0 + std::abs(bound))) break;
  }
  if (calls) *calls = n;
  return best;
}

}  // namespace structsvm
