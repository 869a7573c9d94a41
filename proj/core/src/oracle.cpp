#include "structsvm/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "structsvm/error.hpp"

namespace structsvm {

bool SlopeWindow::admits(double h, double g) const {
  const bool lower = strict_mode ? lo * h < g : lo * h <= g;
  if (std::isinf(hi)) return lower && h > 0.0;
  const bool upper = strict_mode ? hi * h >= g : hi * h > g;
  return lower && upper;
}

double lagrangian(const LabelPoint& p, double lam) { return std::isinf(lam) ? p.g : p.h + lam * p.g; }

bool oracle_prefers(const LabelPoint& a, const LabelPoint& b, double lam) {
  if (std::isinf(lam)) {
    if (a.g != b.g) return a.g > b.g;
    if (a.h != b.h) return a.h > b.h;
    return a.id < b.id;
  }
  const double la = a.h + lam * a.g, lb = b.h + lam * b.g;
  if (la != lb) return la > lb;
  return a.id < b.id;
}

std::optional<OracleAnswer> LambdaOracle::query_constrained(double, const SlopeWindow&) const {
  throw Error(ErrorCode::UnsupportedBackend, "this backend does not serve slope-window queries");
}

namespace {

void check_lambda(double lam) {
  if (!(lam >= 0.0)) throw Error(ErrorCode::InvalidParams, "lambda must be >= 0");
}

}  // namespace

// ---------------------------------------------------------------- enumeration

EnumerationOracle::EnumerationOracle(std::vector<LabelPoint> points) : points_(std::move(points)) {
  if (points_.empty()) throw Error(ErrorCode::InvalidParams, "empty label set");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].h) || !std::isfinite(points_[i].g)) {
      throw Error(ErrorCode::InvalidParams, "non-finite label coordinates");
    }
    if (!index_.emplace(points_[i].id, i).second) throw Error(ErrorCode::DuplicateLabel, "duplicate label id");
  }
}

OracleAnswer EnumerationOracle::query(double lam) const {
  check_lambda(lam);
  const LabelPoint* best = &points_[0];
  for (const auto& p : points_) {
    if (oracle_prefers(p, *best, lam)) best = &p;
  }
  return {*best, lagrangian(*best, lam)};
}

std::optional<OracleAnswer> EnumerationOracle::query_constrained(double lam, const SlopeWindow& window) const {
  check_lambda(lam);
  if (!(window.hi >= window.lo && window.lo >= 0.0)) throw Error(ErrorCode::InvalidParams, "invalid slope window");
  const LabelPoint* best = nullptr;
  for (const auto& p : points_) {
    if (!window.admits(p.h, p.g)) continue;
    if (!best || oracle_prefers(p, *best, lam)) best = &p;
  }
  if (!best) return std::nullopt;
  return OracleAnswer{*best, lagrangian(*best, lam)};
}

std::optional<OracleAnswer> EnumerationOracle::query_banned(double lam, const std::set<LabelId>& banned) const {
  check_lambda(lam);
  const LabelPoint* best = nullptr;
  for (const auto& p : points_) {
    if (banned.count(p.id)) continue;
    if (!best || oracle_prefers(p, *best, lam)) best = &p;
  }
  if (!best) throw Error(ErrorCode::Exhausted, "ban list covers the label space");
  return OracleAnswer{*best, lagrangian(*best, lam)};
}

LabelPoint EnumerationOracle::point_of(LabelId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCode::InvalidLabel, "unknown label id " + std::to_string(id));
  return points_[it->second];
}

// ---------------------------------------------------------------- chain

double ChainInstance::potential(const std::vector<int>& y) const {
  const int S = num_states;
  double s = 0.0;
  for (int p = 0; p < length; ++p) {
    s += unary[static_cast<std::size_t>(p * S + y[p])];
    if (p > 0) s += pairwise[static_cast<std::size_t>((p * S + y[p - 1]) * S + y[p])];
  }
  return s;
}

int ChainInstance::hamming(const std::vector<int>& y) const {
  int d = 0;
  for (int p = 0; p < length; ++p) d += y[p] != true_label[p];
  return d;
}

LabelId ChainInstance::encode(const std::vector<int>& y) const {
  LabelId id = 0;
  for (int p = 0; p < length; ++p) id = id * static_cast<LabelId>(num_states) + static_cast<LabelId>(y[p]);
  return id;
}

std::vector<int> ChainInstance::decode(LabelId id) const {
  std::vector<int> y(static_cast<std::size_t>(length));
  for (int p = length - 1; p >= 0; --p) {
    y[p] = static_cast<int>(id % static_cast<LabelId>(num_states));
    id /= static_cast<LabelId>(num_states);
  }
  return y;
}

void ChainInstance::validate() const {
  if (length <= 0 || num_states <= 0) throw Error(ErrorCode::InvalidParams, "chain needs length, states > 0");
  if (length * std::log2(static_cast<double>(num_states)) >= 63.0) {
    throw Error(ErrorCode::InvalidParams, "chain label space too large for 64-bit ids");
  }
  const auto L = static_cast<std::size_t>(length), S = static_cast<std::size_t>(num_states);
  if (unary.size() != L * S || pairwise.size() != L * S * S || true_label.size() != L) {
    throw Error(ErrorCode::LengthMismatch, "chain score tables have the wrong size");
  }
  for (double v : unary)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidParams, "non-finite unary score");
  for (double v : pairwise)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidParams, "non-finite pairwise score");
  for (int s : true_label)
    if (s < 0 || s >= num_states) throw Error(ErrorCode::InvalidParams, "true state out of range");
}

namespace {

// Lexicographic DP value: (primary, secondary). Finite lambda uses primary only.
struct Val {
  double a = 0.0;
  double b = 0.0;
  Val operator+(const Val& o) const { return {a + o.a, b + o.b}; }
  bool operator>(const Val& o) const { return a != o.a ? a > o.a : b > o.b; }
  bool operator==(const Val& o) const { return a == o.a && b == o.b; }
};

struct ChainScorer {
  const ChainInstance& inst;
  double lam;
  Val unary(int p, int s) const {
    const double u = inst.unary[static_cast<std::size_t>(p * inst.num_states + s)];
    const double loss = s != inst.true_label[p] ? 1.0 : 0.0;
    if (std::isinf(lam)) return {loss, u};
    return {u + lam * loss, 0.0};
  }
  Val pair(int p, int prev, int s) const {
    const double v = inst.pairwise[static_cast<std::size_t>((p * inst.num_states + prev) * inst.num_states + s)];
    if (std::isinf(lam)) return {0.0, v};
    return {v, 0.0};
  }
};

}  // namespace

ChainOracle::ChainOracle(ChainInstance inst, double h_offset) : inst_(std::move(inst)), h_offset_(h_offset) {
  inst_.validate();
  true_potential_ = inst_.potential(inst_.true_label);
}

LabelPoint ChainOracle::point_of_sequence(const std::vector<int>& y) const {
  return {inst_.encode(y), inst_.potential(y) - true_potential_ + h_offset_, static_cast<double>(inst_.hamming(y))};
}

LabelPoint ChainOracle::point_of(LabelId id) const { return point_of_sequence(inst_.decode(id)); }

double ChainOracle::label_space_size() const { return std::pow(static_cast<double>(inst_.num_states), inst_.length); }

OracleAnswer ChainOracle::query(double lam) const {
  check_lambda(lam);
  const int L = inst_.length, S = inst_.num_states;
  const ChainScorer sc{inst_, lam};
  // best[p][s]: best suffix value from position p in state s.
  std::vector<Val> best(static_cast<std::size_t>(L * S));
  for (int s = 0; s < S; ++s) best[static_cast<std::size_t>((L - 1) * S + s)] = sc.unary(L - 1, s);
  for (int p = L - 2; p >= 0; --p) {
    for (int s = 0; s < S; ++s) {
      Val m{};
      bool init = false;
      for (int t = 0; t < S; ++t) {
        const Val c = sc.pair(p + 1, s, t) + best[static_cast<std::size_t>((p + 1) * S + t)];
        if (!init || c > m) {
          m = c;
          init = true;
        }
      }
      best[static_cast<std::size_t>(p * S + s)] = sc.unary(p, s) + m;
    }
  }
  // Forward reconstruction choosing the smallest state on ties gives the smallest id.
  std::vector<int> y(static_cast<std::size_t>(L));
  {
    int arg = 0;
    for (int s = 1; s < S; ++s)
      if (best[static_cast<std::size_t>(s)] > best[static_cast<std::size_t>(arg)]) arg = s;
    y[0] = arg;
  }
  for (int p = 1; p < L; ++p) {
    int arg = 0;
    Val m{};
    for (int t = 0; t < S; ++t) {
      const Val c = sc.pair(p, y[p - 1], t) + best[static_cast<std::size_t>(p * S + t)];
      if (t == 0 || c > m) {
        m = c;
        arg = t;
      }
    }
    y[p] = arg;
  }
  const LabelPoint pt = point_of_sequence(y);
  return {pt, lagrangian(pt, lam)};
}

std::vector<std::vector<int>> ChainOracle::k_best(double lam, std::size_t k) const {
  check_lambda(lam);
  const int L = inst_.length, S = inst_.num_states;
  const ChainScorer sc{inst_, lam};
  struct Entry {
    Val v;
    int prev_state;
    int prev_rank;
  };
  std::vector<std::vector<Entry>> table(static_cast<std::size_t>(L * S));
  for (int s = 0; s < S; ++s) table[static_cast<std::size_t>(s)].push_back({sc.unary(0, s), -1, -1});
  auto by_value = [](const Entry& a, const Entry& b) {
    if (a.v > b.v) return true;
    if (b.v > a.v) return false;
    if (a.prev_state != b.prev_state) return a.prev_state < b.prev_state;
    return a.prev_rank < b.prev_rank;
  };
  for (int p = 1; p < L; ++p) {
    for (int s = 0; s < S; ++s) {
      std::vector<Entry> cand;
      for (int t = 0; t < S; ++t) {
        const auto& prev = table[static_cast<std::size_t>((p - 1) * S + t)];
        for (std::size_t r = 0; r < prev.size(); ++r) {
          cand.push_back({prev[r].v + sc.pair(p, t, s) + sc.unary(p, s), t, static_cast<int>(r)});
        }
      }
      const std::size_t keep = std::min(k, cand.size());
      std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(keep), cand.end(), by_value);
      cand.resize(keep);
      table[static_cast<std::size_t>(p * S + s)] = std::move(cand);
    }
  }
  struct Final {
    Val v;
    int state;
    int rank;
  };
  std::vector<Final> finals;
  for (int s = 0; s < S; ++s) {
    const auto& cell = table[static_cast<std::size_t>((L - 1) * S + s)];
    for (std::size_t r = 0; r < cell.size(); ++r) finals.push_back({cell[r].v, s, static_cast<int>(r)});
  }
  std::stable_sort(finals.begin(), finals.end(), [](const Final& a, const Final& b) { return a.v > b.v; });
  if (finals.size() > k) finals.resize(k);
  std::vector<std::vector<int>> out;
  for (const auto& f : finals) {
    std::vector<int> y(static_cast<std::size_t>(L));
    int s = f.state, r = f.rank;
    for (int p = L - 1; p >= 0; --p) {
      y[p] = s;
      const Entry& e = table[static_cast<std::size_t>(p * S + s)][static_cast<std::size_t>(r)];
      s = e.prev_state;
      r = e.prev_rank;
    }
    out.push_back(std::move(y));
  }
  return out;
}

std::optional<OracleAnswer> ChainOracle::query_banned(double lam, const std::set<LabelId>& banned) const {
  if (banned.empty()) return query(lam);
  const double space = label_space_size();
  if (static_cast<double>(banned.size()) >= space) {
    // Could still be exhausted only if every id is banned.
    bool all = true;
    for (LabelId id = 0; static_cast<double>(id) < space && all; ++id) all = banned.count(id) != 0;
    if (all) throw Error(ErrorCode::Exhausted, "ban list covers the label space");
  }
  const auto cap = static_cast<std::size_t>(std::min(space, 1e9));
  std::size_t k = std::min(banned.size() + 1, cap);
  for (;;) {
    const auto seqs = k_best(lam, k);
    std::optional<LabelPoint> best;
    for (const auto& y : seqs) {
      const LabelPoint pt = point_of_sequence(y);
      if (banned.count(pt.id)) continue;
      if (!best || oracle_prefers(pt, *best, lam)) best = pt;
    }
    if (best) return OracleAnswer{*best, lagrangian(*best, lam)};
    if (k >= cap) throw Error(ErrorCode::Exhausted, "ban list covers the label space");
    k = std::min(k * 2, cap);
  }
}

EnumerationOracle ChainOracle::enumerate() const {
  const double space = label_space_size();
  if (space > static_cast<double>(1 << 20)) throw Error(ErrorCode::InvalidParams, "chain too large to enumerate");
  std::vector<LabelPoint> pts;
  pts.reserve(static_cast<std::size_t>(space));
  for (LabelId id = 0; static_cast<double>(id) < space; ++id) pts.push_back(point_of(id));
  return EnumerationOracle(std::move(pts));
}

// ---------------------------------------------------------------- multi-label

MultiLabelOracle::MultiLabelOracle(std::vector<double> scores, std::vector<int> truth, MultiLabelConvention conv,
                                   double h_offset)
    : scores_(std::move(scores)), conv_(conv), h_offset_(h_offset) {
  if (scores_.empty() || scores_.size() > 63) throw Error(ErrorCode::InvalidParams, "multi-label needs 1..63 labels");
  for (int j : truth) {
    if (j < 0 || static_cast<std::size_t>(j) >= scores_.size()) throw Error(ErrorCode::InvalidLabel, "truth label out of range");
    truth_mask_ |= LabelId{1} << j;
  }
  if (conv_ == MultiLabelConvention::MicroF1 && truth_mask_ == 0) {
    throw Error(ErrorCode::EmptyTruth, "micro-F1 convention needs a nonempty true label set");
  }
}

std::vector<int> MultiLabelOracle::labels_of(LabelId id) {
  std::vector<int> out;
  for (int j = 0; j < 64; ++j)
    if (id >> j & 1) out.push_back(j);
  return out;
}

LabelId MultiLabelOracle::id_of(const std::vector<int>& labels) {
  LabelId id = 0;
  for (int j : labels) id |= LabelId{1} << j;
  return id;
}

double MultiLabelOracle::label_space_size() const { return std::ldexp(1.0, static_cast<int>(scores_.size())); }

LabelPoint MultiLabelOracle::point_of(LabelId id) const {
  double s = 0.0;
  for (std::size_t j = 0; j < scores_.size(); ++j) {
    const bool in = id >> j & 1, tr = truth_mask_ >> j & 1;
    if (in) s += scores_[j];
    if (tr) s -= scores_[j];
  }
  const double ham = std::popcount(id ^ truth_mask_);
  if (conv_ == MultiLabelConvention::MarginHamming) return {id, s + h_offset_, ham};
  return {id, ham + s, -static_cast<double>(std::popcount(id) + std::popcount(truth_mask_))};
}

OracleAnswer MultiLabelOracle::query(double lam) const {
  check_lambda(lam);
  LabelId id = 0;
  if (std::isinf(lam)) {
    if (conv_ == MultiLabelConvention::MarginHamming) {
      id = ~truth_mask_ & ((LabelId{1} << scores_.size()) - 1);
    }
    // MicroF1: the empty set maximizes g.
  } else {
    for (std::size_t j = 0; j < scores_.size(); ++j) {
      const bool tr = truth_mask_ >> j & 1;
      double in, out;
      if (conv_ == MultiLabelConvention::MarginHamming) {
        in = scores_[j] + (tr ? 0.0 : lam);
        out = tr ? lam : 0.0;
      } else {
        in = scores_[j] + (tr ? 0.0 : 1.0) - lam;
        out = tr ? 1.0 : 0.0;
      }
      if (in > out) id |= LabelId{1} << j;
    }
  }
  const LabelPoint pt = point_of(id);
  return {pt, lagrangian(pt, lam)};
}

std::optional<OracleAnswer> MultiLabelOracle::query_banned(double lam, const std::set<LabelId>& banned) const {
  if (banned.empty()) return query(lam);
  if (scores_.size() > 20) throw Error(ErrorCode::UnsupportedBackend, "ban lists need <= 20 labels on this backend");
  check_lambda(lam);
  std::optional<LabelPoint> best;
  const LabelId n = LabelId{1} << scores_.size();
  for (LabelId id = 0; id < n; ++id) {
    if (banned.count(id)) continue;
    const LabelPoint pt = point_of(id);
    if (!best || oracle_prefers(pt, *best, lam)) best = pt;
  }
  if (!best) throw Error(ErrorCode::Exhausted, "ban list covers the label space");
  return OracleAnswer{*best, lagrangian(*best, lam)};
}

// ---------------------------------------------------------------- fixtures

EnumerationOracle three_label_hard_instance(double H_hat, double G_hat, double eps) {
  if (!(eps > 0.0 && eps < std::min(H_hat, G_hat) / 4.0)) {
    throw Error(ErrorCode::InvalidParams, "hard instance needs 0 < eps < min(H, G) / 4");
  }
  return EnumerationOracle({{0, eps, G_hat}, {1, H_hat, eps}, {2, H_hat / 2.0, G_hat / 2.0}});
}

EnumerationOracle oscillation_game_instance(double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidParams, "oscillation instance needs eps > 0");
  return EnumerationOracle({{0, 2.0, 4.0}, {1, 4.0, 2.0}, {2, 3.0 + eps, 3.0}});
}

}  // namespace structsvm
