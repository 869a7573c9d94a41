#include "structsvm/adversary.hpp"

#include <algorithm>
#include <cmath>

#include "structsvm/error.hpp"

namespace structsvm {

namespace {

struct P2 {
  double h, g;
};
using Poly = std::vector<P2>;

Poly clip(const Poly& poly, const HalfPlane& hp) {
  Poly out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const P2& a = poly[i];
    const P2& b = poly[(i + 1) % n];
    const double fa = hp.a * a.h + hp.b * a.g - hp.c;
    const double fb = hp.a * b.h + hp.b * b.g - hp.c;
    if (fa <= 0) out.push_back(a);
    if ((fa < 0 && fb > 0) || (fa > 0 && fb < 0)) {
      const double t = fa / (fa - fb);
      out.push_back({a.h + t * (b.h - a.h), a.g + t * (b.g - a.g)});
    }
  }
  return out;
}

// Shoelace relative to the first vertex; absolute coordinates cancel badly on tiny polygons.
double area(const Poly& p) {
  double s = 0.0;
  const P2 o = p[0];
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    const double ah = p[i].h - o.h, ag = p[i].g - o.g;
    const double bh = p[i + 1].h - o.h, bg = p[i + 1].g - o.g;
    s += ah * bg - bh * ag;
  }
  return std::abs(s) / 2.0;
}

Poly rect_poly(const Rect& r) { return {{r.h_lo, r.g_lo}, {r.h_hi, r.g_lo}, {r.h_hi, r.g_hi}, {r.h_lo, r.g_hi}}; }

bool in_region(const ConvexRegion& region, double h, double g) {
  for (const auto& hp : region)
    if (hp.a * h + hp.b * g > hp.c) return false;
  return true;
}

// A strict half-plane a*h + b*g < c.
bool strictly_inside(const HalfPlane& hp, double h, double g) { return hp.a * h + hp.b * g < hp.c; }

// Largest-effort open square inside r and all strict half-planes, or nothing.
std::optional<Rect> find_rect(const Rect& r, const std::vector<HalfPlane>& strict) {
  Poly poly = rect_poly(r);
  for (const auto& hp : strict) {
    poly = clip(poly, hp);
    if (poly.empty()) return std::nullopt;
  }
  const double scale = (r.h_hi - r.h_lo) * (r.g_hi - r.g_lo);
  if (poly.size() < 3 || area(poly) <= 1e-18 * scale) return std::nullopt;
  P2 c{0.0, 0.0};
  for (const auto& v : poly) {
    c.h += v.h / static_cast<double>(poly.size());
    c.g += v.g / static_cast<double>(poly.size());
  }
  double half = 0.25 * std::min(r.h_hi - r.h_lo, r.g_hi - r.g_lo);
  for (int it = 0; it < 200; ++it, half *= 0.5) {
    const Rect sq{c.h - half, c.h + half, c.g - half, c.g + half};
    if (sq.h_lo <= r.h_lo || sq.h_hi >= r.h_hi || sq.g_lo <= r.g_lo || sq.g_hi >= r.g_hi) continue;
    bool ok = true;
    for (const auto& hp : strict) {
      for (double h : {sq.h_lo, sq.h_hi})
        for (double g : {sq.g_lo, sq.g_hi}) ok = ok && strictly_inside(hp, h, g);
    }
    if (ok) return sq;
  }
  return std::nullopt;
}

}  // namespace

AdversarialLabelStream::AdversarialLabelStream(int num_labels)
    : num_labels_(num_labels), rect_{0.0, 100.0, 0.0, 100.0} {
  if (num_labels < 2) throw Error(ErrorCode::InvalidParams, "adversarial stream needs at least 2 labels");
}

std::optional<LabelPoint> AdversarialLabelStream::query(double lam, const ConvexRegion& region) {
  if (!(lam > 0.0) || !std::isfinite(lam)) throw Error(ErrorCode::InconsistentQuery, "lambda must be positive");
  if (queries_ >= num_labels_ - 1) throw Error(ErrorCode::InconsistentQuery, "query budget exhausted");
  {
    Poly big{{-1e9, -1e9}, {1e9, -1e9}, {1e9, 1e9}, {-1e9, 1e9}};
    for (const auto& hp : region) {
      if (hp.a == 0.0 && hp.b == 0.0 && hp.c < 0.0) big.clear();
      if (big.empty()) break;
      big = clip(big, hp);
    }
    if (big.empty()) throw Error(ErrorCode::InconsistentQuery, "empty query region");
  }

  std::optional<LabelPoint> best;
  for (const auto& y : revealed_) {
    if (!in_region(region, y.h, y.g)) continue;
    if (!best || y.h + lam * y.g > best->h + lam * best->g) best = y;
  }

  // Pieces of R minus {points the answer would contradict}.
  std::vector<std::vector<HalfPlane>> pieces;
  if (best) pieces.push_back({HalfPlane{1.0, lam, best->h + lam * best->g}});
  for (const auto& hp : region) pieces.push_back({HalfPlane{-hp.a, -hp.b, -hp.c}});
  for (const auto& piece : pieces) {
    if (auto r = find_rect(rect_, piece)) {
      rect_ = *r;
      ++queries_;
      return best;
    }
  }

  // Every point of R is in the region and beats the revealed ones: reveal a new label.
  LabelPoint y{static_cast<LabelId>(revealed_.size()), 0.5 * (rect_.h_lo + rect_.h_hi), 0.5 * (rect_.g_lo + rect_.g_hi)};
  if (y.h == lam * y.g) y.h = rect_.h_lo + 0.75 * (rect_.h_hi - rect_.h_lo);
  if (!in_region(region, y.h, y.g) || (best && !(y.h + lam * y.g > best->h + lam * best->g)))
    throw Error(ErrorCode::InconsistentQuery, "hidden region below floating-point resolution");
  const double phi0 = y.h * y.g, K = y.h + lam * y.g;
  const double gap = lam * y.g - y.h;
  const double sigma = gap > 0 ? 1.0 : -1.0;
  const double room = 0.25 * std::min({y.h - rect_.h_lo, rect_.h_hi - y.h, y.g - rect_.g_lo, rect_.g_hi - y.g});
  double eps = std::min(std::abs(gap) / (4.0 * lam), room / (1.0 + lam));
  std::optional<Rect> next;
  for (int it = 0; it < 200 && !next; ++it, eps *= 0.5) {
    const double ph = y.h + sigma * lam * eps, pg = y.g - sigma * eps;
    const double gain = ph * pg - phi0;
    if (!(gain > 0)) continue;
    const double delta = gain / (4.0 * (std::abs(pg) + std::abs(ph) + 1.0));
    const double qh = ph - delta, qg = pg;
    double half = delta / 4.0;
    for (int j = 0; j < 200; ++j, half *= 0.5) {
      const Rect sq{qh - half, qh + half, qg - half, qg + half};
      if (sq.h_lo <= rect_.h_lo || sq.h_hi >= rect_.h_hi || sq.g_lo <= rect_.g_lo || sq.g_hi >= rect_.g_hi) continue;
      if (sq.h_lo * sq.g_lo <= phi0) continue;
      if (sq.h_hi + lam * sq.g_hi >= K) continue;
      next = sq;
      break;
    }
  }
  if (!next) throw Error(ErrorCode::InconsistentQuery, "could not shrink the hidden region (numerical limit)");
  rect_ = *next;
  revealed_.push_back(y);
  ++queries_;
  return y;
}

LabelPoint AdversarialLabelStream::final_label() const {
  if (queries_ < num_labels_ - 1) throw Error(ErrorCode::InconsistentQuery, "final label needs M - 1 queries");
  return {static_cast<LabelId>(revealed_.size()), 0.5 * (rect_.h_lo + rect_.h_hi), 0.5 * (rect_.g_lo + rect_.g_hi)};
}

}  // namespace structsvm
