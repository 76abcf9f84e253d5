#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "oracles.hpp"
#include "scpg/quartic.hpp"
#include "scpg/rng.hpp"

using namespace scpg;

namespace {

bool roots_match(const std::vector<double>& got, const std::vector<double>& expected,
                 double tol) {
  if (got.size() != expected.size()) return false;
  for (std::size_t i = 0; i < got.size(); ++i)
    if (std::fabs(got[i] - expected[i]) > tol * std::max(1.0, std::fabs(expected[i])))
      return false;
  return true;
}

}  // namespace

TEST_CASE("mu^4 + 2 mu^3 + mu^2 - 4 has roots -2 and 1") {
  const QuarticCoefficients q{1.0, 2.0, 1.0, 0.0, -4.0};
  const auto roots = solve_quartic_real_roots(q);
  CHECK(roots_match(roots, {-2.0, 1.0}, 1e-10));
}

TEST_CASE("factored quartics") {
  // (mu^2 - 1)(mu^2 - 4)
  const auto r1 = solve_quartic_real_roots({1.0, 0.0, -5.0, 0.0, 4.0});
  CHECK(roots_match(r1, {-2.0, -1.0, 1.0, 2.0}, 1e-10));

  // -(mu^4 - 1): negative leading coefficient
  const auto r2 = solve_quartic_real_roots({-1.0, 0.0, 0.0, 0.0, 1.0});
  CHECK(roots_match(r2, {-1.0, 1.0}, 1e-10));

  // (mu - 3)^4: quadruple root collapses to one entry
  const auto r3 = solve_quartic_real_roots({1.0, -12.0, 54.0, -108.0, 81.0});
  REQUIRE(r3.size() == 1);
  CHECK(r3[0] == doctest::Approx(3.0).epsilon(1e-4));

  // no real roots
  const auto r4 = solve_quartic_real_roots({1.0, 0.0, 1.0, 0.0, 1.0});
  CHECK(r4.empty());
}

TEST_CASE("roots come back ascending and deduplicated") {
  const auto roots = solve_quartic_real_roots({2.0, -2.0, -16.0, 8.0, 24.0});
  for (std::size_t i = 1; i < roots.size(); ++i) CHECK(roots[i] > roots[i - 1]);
}

TEST_CASE("invalid input throws") {
  CHECK_THROWS_AS(solve_quartic_real_roots({0.0, 1.0, 1.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(
      solve_quartic_real_roots({std::numeric_limits<double>::quiet_NaN(), 1.0, 1.0, 1.0, 1.0}),
      std::invalid_argument);
}

TEST_CASE("random quartics match the bracketing oracle") {
  Rng rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    QuarticCoefficients q;
    q.c4 = (rng.bernoulli(0.5) ? 1.0 : -1.0) * rng.uniform(0.5, 2.0);
    const double scale = trial % 3 == 0 ? 10.0 : (trial % 3 == 1 ? 2.0 : 0.5);
    q.c3 = scale * rng.normal();
    q.c2 = scale * rng.normal();
    q.c1 = scale * rng.normal();
    q.c0 = scale * rng.normal();

    const auto roots = solve_quartic_real_roots(q);
    const auto expected = oracle::quartic_real_roots_bracketing(q);

    REQUIRE(roots.size() == expected.size());
    for (std::size_t i = 0; i < roots.size(); ++i) {
      CHECK(std::fabs(roots[i] - expected[i]) <=
            1e-6 * std::max(1.0, std::fabs(expected[i])));
      CHECK(std::fabs(q.eval(roots[i])) <= 1e-8 * std::max(1.0, std::fabs(q.c0)));
    }
    checked += static_cast<int>(roots.size());
  }
  CHECK(checked > 2000);  // random quartics average about two real roots
}

TEST_CASE("residual contract holds near double roots") {
  // (mu - 1)^2 (mu^2 + mu + 5) has a double root at 1
  const QuarticCoefficients q{1.0, -1.0, 4.0, -9.0, 5.0};
  const auto roots = solve_quartic_real_roots(q);
  REQUIRE(roots.size() == 1);
  CHECK(roots[0] == doctest::Approx(1.0).epsilon(1e-6));
}
