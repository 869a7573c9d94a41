#include "doctest.h"

#include <random>

#include "structsvm/error.hpp"
#include "structsvm/search.hpp"
#include "support/reference.hpp"

using namespace structsvm;

namespace {

void check_trace_monotone(const SearchResult& r) {
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] >= r.trace[i - 1]);
}

}  // namespace

TEST_SUITE("slack_rescaling_search") {
  TEST_CASE("certificate arithmetic") {
    CHECK(suboptimality_certificate(2.01, 1.0) == doctest::Approx(1.010025).epsilon(1e-15));
    CHECK(suboptimality_certificate(2.0, 1.0) == 1.0);
    try {
      suboptimality_certificate(1.0, 0.0);
      FAIL("expected NonPositiveLambda");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonPositiveLambda);
    }
  }

  TEST_CASE("certificate bounds the optimum for any lambda") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ul(0.01, 10.0);
    for (int trial = 0; trial < 50; ++trial) {
      const auto pts = ref::random_points(rng, 40, -1, 3, 0, 4);
      const EnumerationOracle o(pts);
      const double star = ref::phi_star(pts);
      for (int i = 0; i < 20; ++i) {
        const double lam = ul(rng);
        CHECK(suboptimality_certificate(o.query(lam).oracle_value, lam) >= star - 1e-12);
      }
    }
  }

  TEST_CASE("lambda-only searches fail on the hard instance") {
    const auto hard = three_label_hard_instance(2, 2, 0.01);
    const auto b = binary_search_sgd(hard, 1e-3, 1e3);
    CHECK(b.best_value <= 0.02 + 1e-12);
    REQUIRE(b.certificate);
    CHECK(*b.certificate >= 1.0);
    for (double lam0 : {0.01, 0.3, 1.0, 3.0, 100.0})
      for (int iters : {1, 5, 50, 500}) {
        const auto r = bisecting_search(hard, lam0, iters);
        CHECK(r.best_value <= 0.02 + 1e-12);
        REQUIRE(r.best);
        CHECK(r.best->id != 2);
        if (r.certificate) CHECK(*r.certificate >= 1.0);
      }
  }

  TEST_CASE("single-label spaces") {
    const EnumerationOracle one({{7, 1.5, 2.0}});
    const auto b = binary_search_sgd(one, 0.1, 10);
    REQUIRE(b.best);
    CHECK(b.best->id == 7);
    CHECK(b.oracle_calls <= 2);
    const auto s = bisecting_search(one, 1.0, 100);
    REQUIRE(s.best);
    CHECK(s.best->id == 7);
    CHECK(s.oracle_calls <= 4);
    const auto a = angular_search(one, 1.0, 100);
    REQUIRE(a.best);
    CHECK(a.best->id == 7);
  }

  TEST_CASE("binary search finds a lambda-reachable optimum") {
    std::vector<LabelPoint> arc;
    for (int i = 0; i < 5; ++i) {
      const double th = 0.2 + 0.3 * i;
      arc.push_back({static_cast<LabelId>(i), 2 * std::cos(th), 2 * std::sin(th)});
    }
    const auto r = binary_search_sgd(EnumerationOracle(arc), 1e-2, 1e2);
    CHECK(r.best_value == doctest::Approx(ref::phi_star(arc)).epsilon(1e-12));
  }

  TEST_CASE("bisecting search: value below optimum, certificate above") {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 100; ++trial) {
      const auto pts = ref::random_points(rng, 50, -1, 3, 0.01, 4);
      const auto r = bisecting_search(EnumerationOracle(pts), 1.0, 100);
      const double star = ref::phi_star(pts);
      CHECK(r.best_value <= star + 1e-12);
      REQUIRE(r.certificate);
      CHECK(*r.certificate >= star - 1e-9);
      check_trace_monotone(r);
      const auto b = binary_search_sgd(EnumerationOracle(pts), 1e-3, 1e3);
      CHECK(b.best_value <= star + 1e-12);
      REQUIRE(b.certificate);
      CHECK(*b.certificate >= star - 1e-9);
      check_trace_monotone(b);
    }
  }

  TEST_CASE("angular search is exact on the hard instance") {
    const auto r = angular_search(three_label_hard_instance(2, 2, 0.01), 1.0, 1000);
    REQUIRE(r.best);
    CHECK(r.best->id == 2);
    CHECK(r.best_value == 1.0);
    CHECK(r.oracle_calls <= 7);
  }

  TEST_CASE("angular search is exact on random instances, both queue disciplines") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      std::mt19937_64 rng(100 + seed);
      const int M = 100;
      const auto pts = ref::random_points(rng, M, -1, 3, 0, 4);
      const EnumerationOracle o(pts);
      const auto fifo = angular_search(o, 1.0, 100000);
      CHECK(fifo.best_value == ref::phi_star(pts));
      CHECK(fifo.oracle_calls <= 2 * M + 1);
      check_trace_monotone(fifo);
      AngularOptions pq;
      pq.queue = QueueDiscipline::Priority;
      const auto prio = angular_search(o, 1.0, 100000, std::nullopt, pq);
      CHECK(prio.best_value == fifo.best_value);
      REQUIRE(prio.best);
      CHECK(prio.best->id == fifo.best->id);
      REQUIRE(fifo.certificate);
      CHECK(*fifo.certificate == doctest::Approx(fifo.best_value));
    }
  }

  TEST_CASE("angular suboptimality bound at every iteration") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> ul(0.2, 5.0);
    for (int trial = 0; trial < 30; ++trial) {
      const auto pts = ref::random_points(rng, 60, 0.05, 3, 0.05, 4);
      const EnumerationOracle o(pts);
      const double lam0 = ul(rng);
      const auto r = angular_search(o, lam0, 63);
      const auto first = o.query_constrained(lam0, {kLambdaInf, 0.0, true});
      REQUIRE(first);
      const double d = first->point.g / first->point.h;
      const double v1 = std::max(lam0 * d, 1.0 / (lam0 * d));
      const double star = ref::phi_star(pts);
      for (std::size_t t = 1; t <= r.trace.size(); ++t)
        CHECK(star / r.trace[t - 1] <= std::pow(v1, 4.0 / (static_cast<double>(t) + 1.0)) * (1 + 1e-12));
    }
  }

  TEST_CASE("angular search with a guaranteed start window") {
    std::mt19937_64 rng(34);
    for (int trial = 0; trial < 20; ++trial) {
      const auto pts = ref::random_points(rng, 80, 0.05, 3, 0.05, 4);
      const auto init = angular_guaranteed_init(3.0, 4.0, 0.01);
      CHECK(init.lam0 == doctest::Approx(3.0 / 4.0));
      CHECK(init.slope_hi == doctest::Approx(16.0 / 0.01));
      CHECK(init.slope_lo == doctest::Approx(0.01 / 9.0));
      const auto r = angular_search(EnumerationOracle(pts), init.lam0, 100000, std::make_pair(init.slope_hi, init.slope_lo));
      CHECK(r.best_value == ref::phi_star(pts));
    }
    CHECK(angular_guaranteed_init(2, 2).slope_lo == doctest::Approx((4.0 / 1024) / 4));
  }

  TEST_CASE("label cache prunes without changing the answer") {
    std::mt19937_64 rng(35);
    for (int trial = 0; trial < 20; ++trial) {
      const auto pts = ref::random_points(rng, 60, -1, 3, 0, 4);
      const EnumerationOracle o(pts);
      const auto plain = angular_search(o, 1.0, 100000);
      AngularOptions cached;
      LabelPoint best = pts[0];
      for (const auto& p : pts)
        if (p.h > 0 && p.g > 0 && p.h * p.g > best.h * best.g) best = p;
      cached.label_cache = {best};
      const auto c = angular_search(o, 1.0, 100000, std::nullopt, cached);
      CHECK(c.best_value == plain.best_value);
      CHECK(c.oracle_calls <= plain.oracle_calls);
    }
  }

  TEST_CASE("angular search needs a constrained backend") {
    std::mt19937_64 rng(36);
    const ChainOracle chain(ref::random_chain(rng, 3, 2));
    try {
      angular_search(chain, 1.0, 10);
      FAIL("expected UnsupportedBackend");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnsupportedBackend);
    }
  }
}
