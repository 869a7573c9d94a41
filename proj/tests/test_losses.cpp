#include "doctest.h"

#include <random>

#include "structsvm/error.hpp"
#include "structsvm/losses.hpp"
#include "support/reference.hpp"

using namespace structsvm;

namespace {

std::vector<BiCriteriaLoss> nonnegative_families() {
  return {BiCriteriaLoss::margin(),           BiCriteriaLoss::slack(),
          BiCriteriaLoss::generalized(1.5, 0.8), BiCriteriaLoss::generalized(1.0, 0.0),
          BiCriteriaLoss::beta_scaling(0.5),  BiCriteriaLoss::beta_scaling(1.0),
          BiCriteriaLoss::log_loss(),         BiCriteriaLoss::probloss(),
          BiCriteriaLoss::probloss_convex()};
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

}  // namespace

TEST_SUITE("losses") {
  TEST_CASE("table values") {
    const auto pl = BiCriteriaLoss::probloss();
    CHECK(pl.value(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(pl.value(0, 4) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(pl.value(1, 1) == doctest::Approx(2.0 * ref::normal_cdf(1.0, 0.0, 2.0 / M_PI)).epsilon(1e-12));
    CHECK(pl.value(1, 1) == doctest::Approx(1.7899).epsilon(1e-4));
    CHECK(BiCriteriaLoss::slack().value(-1, 7) == 0.0);
    CHECK(BiCriteriaLoss::margin().value(2, 3) == 5.0);
    CHECK(BiCriteriaLoss::generalized(1.5, 0.5).value(2, 4) == doctest::Approx(2 * 2 + 8));
    CHECK(BiCriteriaLoss::beta_scaling(0.5).value(2, 4) == doctest::Approx(2 * 2 + 4));
    CHECK(BiCriteriaLoss::log_loss().value(0, 3) == doctest::Approx(3.0));
    CHECK(BiCriteriaLoss::log_loss().value(1.5, 2) == doctest::Approx(2 * std::log(std::exp(1.5) + 1) / std::log(2.0)));
    CHECK(BiCriteriaLoss::microf1().value(1, -3) == doctest::Approx(1.0 / 3));
  }

  TEST_CASE("normal cdf agrees with the integration reference") {
    for (double x : {-6.0, -2.5, -1.0, -0.1, 0.0, 0.3, 1.0, 2.0, 5.0})
      for (double var : {0.2, 2.0 / M_PI, 1.0, 3.0})
        CHECK(normal_cdf(x, 0.0, var) == doctest::Approx(ref::normal_cdf(x, 0.0, var)).epsilon(1e-12));
  }

  TEST_CASE("analytic gradients") {
    const auto g = BiCriteriaLoss::slack().grad(0.7, 3.0);
    CHECK(g.dh == 3.0);
    CHECK(g.dg == doctest::Approx(1.7));
    const auto m = BiCriteriaLoss::margin().grad(-4, 9);
    CHECK(m.dh == 1.0);
    CHECK(m.dg == 1.0);
    CHECK(BiCriteriaLoss::probloss().grad(0, 4).dh == doctest::Approx(2.0).epsilon(1e-12));
  }

  TEST_CASE("ProbLoss slope at h=0 is sqrt(g)") {
    const auto pl = BiCriteriaLoss::probloss();
    for (double g : {1.0, 2.0, 4.0, 9.0}) {
      CHECK(std::abs(pl.grad(0, g).dh - std::sqrt(g)) <= 1e-6);
      const double fd = ref::central_diff([&](double h) { return pl.value(h, g); }, 0.0, 1e-5);
      CHECK(std::abs(fd - std::sqrt(g)) <= 1e-6);
    }
  }

  TEST_CASE("gradients match central differences") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> uh(-2.0, 2.0), ug(0.2, 5.0), ugn(-8.0, -0.5), uhp(0.0, 5.0);
    auto check = [&](const BiCriteriaLoss& loss, double h, double g) {
      const auto gr = loss.grad(h, g);
      const double fh = ref::central_diff([&](double x) { return loss.value(x, g); }, h, 1e-6);
      const double fg = ref::central_diff([&](double x) { return loss.value(h, x); }, g, 1e-6);
      CHECK(std::abs(gr.dh - fh) <= 1e-4 * std::max(1.0, std::abs(fh)));
      CHECK(std::abs(gr.dg - fg) <= 1e-4 * std::max(1.0, std::abs(fg)));
    };
    for (const auto& loss : nonnegative_families())
      for (int i = 0; i < 500; ++i) {
        double h = uh(rng);
        if (loss.family() == LossFamily::ProbLossConvexExt && std::abs(h) < 1e-3) h += 0.01;
        check(loss, h, ug(rng));
      }
    for (int i = 0; i < 500; ++i) check(BiCriteriaLoss::microf1(), uhp(rng), ugn(rng));
  }

  TEST_CASE("convex ProbLoss extension") {
    CHECK(probloss_convex_ext(0, 3) == doctest::Approx(3.0));
    CHECK(probloss_convex_ext(2, 4) == doctest::Approx(8.0));
    const double tail = 2.0 * ref::normal_lower_tail(10.0 / std::sqrt(2.0 / M_PI));
    CHECK(std::abs(probloss_convex_ext(-10, 1) - tail) <= 1e-12);
    CHECK(probloss_convex_ext(-10, 1) <= 1e-12);
    CHECK(code_of([] { probloss_convex_ext(1, 0); }) == ErrorCode::DomainError);
    // Convex in h along a line through 0.
    for (double g : {1.0, 3.0, 7.0})
      for (double h = -3; h <= 3; h += 0.25) {
        const double mid = probloss_convex_ext(h, g);
        const double avg = 0.5 * (probloss_convex_ext(h - 0.1, g) + probloss_convex_ext(h + 0.1, g));
        CHECK(mid <= avg + 1e-12);
      }
  }

  TEST_CASE("micro-F1 factors") {
    auto f = microf1_factors({1}, {1, 2}, 0);
    CHECK(f.h == 1.0);
    CHECK(f.g == -3.0);
    CHECK(BiCriteriaLoss::microf1().value(f.h, f.g) == doctest::Approx(1.0 / 3));
    f = microf1_factors({1, 2}, {1, 2}, 0);
    CHECK(BiCriteriaLoss::microf1().value(f.h, f.g) == 0.0);
    f = microf1_factors({3}, {1, 2}, 0.5);
    CHECK(f.h == 3.5);
    CHECK(f.g == -3.0);
    CHECK(BiCriteriaLoss::microf1().value(f.h, f.g) == doctest::Approx(3.5 / 3));
    CHECK(code_of([] { microf1_factors({1}, {}, 0); }) == ErrorCode::EmptyTruth);
  }

  TEST_CASE("micro-F1 tightness, exhaustive over 8 labels") {
    const int L = 8;
    const auto loss = BiCriteriaLoss::microf1();
    for (unsigned t = 1; t < (1u << L); ++t)
      for (unsigned y = 0; y < (1u << L); ++y) {
        std::vector<int> ys, ts;
        for (int i = 0; i < L; ++i) {
          if (y >> i & 1) ys.push_back(i);
          if (t >> i & 1) ts.push_back(i);
        }
        const auto f = microf1_factors(ys, ts, 0.0);
        const double inter = __builtin_popcount(y & t);
        const double f1 = 2.0 * inter / (__builtin_popcount(y) + __builtin_popcount(t));
        REQUIRE(loss.value(f.h, f.g) == doctest::Approx(1.0 - f1).epsilon(1e-14));
      }
  }

  TEST_CASE("parameter bounds") {
    CHECK(code_of([] { BiCriteriaLoss::generalized(0.5, 1.8); }) == ErrorCode::InvalidParams);
    CHECK(code_of([] { BiCriteriaLoss::beta_scaling(1.5); }) == ErrorCode::InvalidParams);
    CHECK(code_of([] { BiCriteriaLoss::beta_scaling(-0.1); }) == ErrorCode::InvalidParams);
    CHECK(code_of([] { BiCriteriaLoss::from_name("nope"); }) == ErrorCode::InvalidParams);
    CHECK_NOTHROW(BiCriteriaLoss::generalized(1.0, 1.0));
    CHECK(BiCriteriaLoss::from_name("genscale", 1.5, 0.8).family() == LossFamily::GeneralizedScaling);
  }

  TEST_CASE("domain regimes") {
    CHECK(code_of([] { BiCriteriaLoss::slack().value(0, -1); }) == ErrorCode::DomainError);
    CHECK(code_of([] { BiCriteriaLoss::probloss().grad(0, -1); }) == ErrorCode::DomainError);
    CHECK(code_of([] { BiCriteriaLoss::microf1().value(1, 2); }) == ErrorCode::DomainError);
    CHECK_NOTHROW(BiCriteriaLoss::margin().value(0, -1));
    CHECK(BiCriteriaLoss::probloss().value(3, 0) == 0.0);
  }

  TEST_CASE("axiom suites report zero violations") {
    for (const auto& loss : nonnegative_families()) {
      const auto r = check_bicriteria_axioms(loss, 1000, 7);
      INFO(loss.name());
      CHECK(r.samples > 0);
      CHECK(r.monotone_violations == 0);
      CHECK(r.quasiconcavity_violations == 0);
      CHECK(r.diagonal_violations == 0);
    }
    CHECK(check_bicriteria_axioms(BiCriteriaLoss::microf1(), 1000, 7).ok());
  }

  TEST_CASE("upper bound on the 0-1 loss") {
    // With margin >= 0 and a wrong label (g >= 1), every family gives psi >= 1; ProbLoss gives psi >= g.
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> uh(0.0, 4.0);
    std::uniform_int_distribution<int> ug(1, 10);
    for (const auto& loss : nonnegative_families())
      for (int i = 0; i < 300; ++i) {
        const double h = uh(rng), g = ug(rng);
        CHECK(loss.value(h, g) >= 1.0 - 1e-12);
      }
    for (int i = 0; i < 300; ++i) {
      const double h = uh(rng), g = ug(rng);
      CHECK(BiCriteriaLoss::probloss().value(h, g) >= g - 1e-12);
    }
  }

  TEST_CASE("required margins") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ug(0.1, 10.0);
    for (int i = 0; i < 100; ++i) {
      const double g = ug(rng);
      CHECK(BiCriteriaLoss::margin().value(-g, g) == 0.0);
      CHECK(BiCriteriaLoss::slack().value(-1.0, g) == 0.0);
    }
  }
}
