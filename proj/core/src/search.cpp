#include "structsvm/search.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>

#include "structsvm/error.hpp"

namespace structsvm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void consider(SearchResult& r, const LabelPoint& y) {
  const double v = phi(y);
  if (y.h > 0.0 && y.g > 0.0 && v > r.best_value) {
    r.best = y;
    r.best_value = v;
  }
}

void tighten(SearchResult& r, double bound) {
  if (!r.certificate || bound < *r.certificate) r.certificate = bound;
}

}  // namespace

double phi(const LabelPoint& p) { return p.h * p.g; }

double suboptimality_certificate(double K, double lam) {
  if (!(lam > 0.0)) throw Error(ErrorCode::NonPositiveLambda, "certificate needs lambda > 0");
  return K * K / (4.0 * lam);
}

SearchResult binary_search_sgd(const LambdaOracle& oracle, double lam_lo, double lam_hi, double tol) {
  if (!(lam_lo > 0.0 && lam_lo < lam_hi && tol > 0.0)) {
    throw Error(ErrorCode::InvalidParams, "binary search needs 0 < lam_lo < lam_hi and tol > 0");
  }
  SearchResult r;
  // F(lam) = K(lam^2)^2 / (4 lam^2), one oracle call per evaluation.
  auto eval = [&](double lam) {
    const double mu = lam * lam;
    const OracleAnswer a = oracle.query(mu);
    ++r.oracle_calls;
    consider(r, a.point);
    const double f = suboptimality_certificate(std::max(a.oracle_value, 0.0), mu);
    tighten(r, f);
    r.trace.push_back(r.best_value);
    return std::make_pair(f, a.point.id);
  };
  double a = lam_lo, b = lam_hi;
  auto [fa, ya] = eval(a);
  auto [fb, yb] = eval(b);
  (void)fa;
  (void)fb;
  if (ya == yb) return r;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  auto [fc, yc] = eval(c);
  auto [fd, yd] = eval(d);
  while (b - a > tol * std::max(1.0, a)) {
    if (fc <= fd) {
      b = d;
      yb = yd;
      d = c;
      fd = fc;
      yd = yc;
      c = b - invphi * (b - a);
      std::tie(fc, yc) = eval(c);
    } else {
      a = c;
      ya = yc;
      c = d;
      fc = fd;
      yc = yd;
      d = a + invphi * (b - a);
      std::tie(fd, yd) = eval(d);
    }
    if (ya == yb) break;
  }
  return r;
}

SearchResult bisecting_search(const LambdaOracle& oracle, double lam0, int max_iters) {
  if (!(lam0 > 0.0) || !std::isfinite(lam0)) throw Error(ErrorCode::NonPositiveLambda, "bisecting search needs lam0 > 0");
  SearchResult r;
  double H_lo = 0.0, H_hi = kInf, G_lo = 0.0, G_hi = kInf;
  double L_lo = 0.0, L_hi = kInf;
  std::optional<LabelId> label_lo, label_hi;
  double lam = lam0;
  for (int it = 0; it < max_iters; ++it) {
    const OracleAnswer a = oracle.query(lam);
    ++r.oracle_calls;
    const LabelPoint& y = a.point;
    consider(r, y);
    tighten(r, suboptimality_certificate(a.oracle_value, lam));
    r.trace.push_back(r.best_value);
    if (r.best && *r.certificate <= r.best_value * (1.0 + 1e-12)) break;

    H_lo = std::max(H_lo, std::min(y.h, lam * y.g));
    H_hi = std::min(H_hi, std::max(y.h, lam * y.g));
    G_lo = std::max(G_lo, std::min(y.g, y.h / lam));
    G_hi = std::min(G_hi, std::max(y.g, y.h / lam));
    if (H_lo > H_hi || G_lo > G_hi) break;

    if (y.g <= y.h / lam) {
      L_lo = lam;
      label_lo = y.id;
    } else {
      L_hi = lam;
      label_hi = y.id;
    }
    if (label_lo && label_hi && *label_lo == *label_hi) break;
    lam = std::isinf(L_hi) ? 2.0 * lam : 0.5 * (L_lo + L_hi);
    if (!std::isinf(L_hi) && L_hi - L_lo <= 1e-12 * L_hi) break;
  }
  return r;
}

AngularInit angular_guaranteed_init(double H_hat, double G_hat, std::optional<double> phi_lower) {
  if (!(H_hat > 0.0 && G_hat > 0.0)) throw Error(ErrorCode::InvalidParams, "angular init needs H, G > 0");
  const double lb = phi_lower.value_or(H_hat * G_hat / 1024.0);
  if (!(lb > 0.0)) throw Error(ErrorCode::InvalidParams, "Phi lower bound must be > 0");
  return {H_hat / G_hat, G_hat * G_hat / lb, lb / (H_hat * H_hat)};
}

SearchResult angular_search(const LambdaOracle& oracle, double lam0, int max_iters,
                            std::optional<std::pair<double, double>> init_window, const AngularOptions& options) {
  if (!(lam0 > 0.0) || !std::isfinite(lam0)) throw Error(ErrorCode::NonPositiveLambda, "angular search needs lam0 > 0");
  SearchResult r;
  for (const auto& y : options.label_cache) consider(r, y);

  AngleTask root{kInf, 0.0, 0, 0, lam0, kInf};
  if (init_window) {
    root.slope_hi = init_window->first;
    root.slope_lo = init_window->second;
    if (!(root.slope_hi >= root.slope_lo && root.slope_lo >= 0.0)) {
      throw Error(ErrorCode::InvalidParams, "initial window needs hi >= lo >= 0");
    }
  }

  // FIFO keeps insertion order; the priority variant pops the largest bound, oldest first.
  std::deque<AngleTask> fifo;
  using Item = std::pair<std::pair<double, long>, AngleTask>;
  auto cmp = [](const Item& a, const Item& b) { return a.first < b.first; };
  std::priority_queue<Item, std::vector<Item>, decltype(cmp)> heap(cmp);
  long seq = 0;
  auto push = [&](const AngleTask& t) {
    if (options.queue == QueueDiscipline::Fifo) {
      fifo.push_back(t);
    } else {
      heap.push({{t.bound, -seq++}, t});
    }
  };
  auto empty = [&] { return options.queue == QueueDiscipline::Fifo ? fifo.empty() : heap.empty(); };
  auto pop = [&] {
    AngleTask t;
    if (options.queue == QueueDiscipline::Fifo) {
      t = fifo.front();
      fifo.pop_front();
    } else {
      t = heap.top().second;
      heap.pop();
    }
    return t;
  };

  push(root);
  int t = 0;
  while (!empty() && t < max_iters) {
    const AngleTask task = pop();
    if (task.bound <= r.best_value) continue;
    double lam = task.lam;
    if (task.slope_lo > 0.0 && std::isfinite(task.slope_hi)) lam = 1.0 / std::sqrt(task.slope_hi * task.slope_lo);
    const SlopeWindow w{task.slope_hi, task.slope_lo, task.strict_flag == 0};
    const auto ans = oracle.query_constrained(lam, w);
    ++t;
    ++r.oracle_calls;
    if (!ans) {
      r.trace.push_back(r.best_value);
      continue;
    }
    const LabelPoint& y = ans->point;
    consider(r, y);
    r.trace.push_back(r.best_value);

    const double h = y.h, g = y.g;
    const double z1 = h, zp1 = lam * g;
    if (std::abs(z1 - zp1) <= options.tie_tol * std::max(std::abs(z1), std::abs(zp1))) continue;
    const double bound = std::min(task.bound, suboptimality_certificate(ans->oracle_value, lam));
    const double dz = g / h;
    const double dzp = (h / lam) / (lam * g);
    const double dr = 1.0 / lam;
    if (dz > dzp) {
      push({dz, dr, 1, task.depth + 1, lam, bound});
      push({dr, dzp, 0, task.depth + 1, lam, bound});
    } else {
      push({dzp, dr, 1, task.depth + 1, lam, bound});
      push({dr, dz, 0, task.depth + 1, lam, bound});
    }
  }

  double open = -kInf;
  while (!empty()) open = std::max(open, pop().bound);
  if (std::isfinite(open) || open == -kInf) r.certificate = std::max(r.best_value, open);
  return r;
}

}  // namespace structsvm
