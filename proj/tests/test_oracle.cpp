#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "secexp/oracle.hpp"
#include "secexp/verify.hpp"
#include "test_util.hpp"

#include <numeric>

using namespace secexp;

// The reference implementations are only useful if they are right on cases
// small enough to check by hand.

TEST_CASE("binomial tails are exact") {
  CHECK(oracle::binomial_cdf(4, 1, Rational(1, 2)) == Rational(5, 16));
  CHECK(oracle::binomial_cdf(8, 2, Rational(1, 2)) == Rational(37, 256));
  CHECK(oracle::binomial_cdf(3, 3, Rational(1, 3)) == 1);
  CHECK(oracle::binomial_cdf(2, 0, Rational(1, 5)) == Rational(16, 25));
}

TEST_CASE("binary Hamming rate-distortion closed form") {
  const double h25 = 0.811278124459133;
  CHECK(near(oracle::binary_rd_hamming(0.5, 0.25), 1 - h25, 1e-12));
  CHECK(oracle::binary_rd_hamming(0.2, 0.3) == 0);
  CHECK(oracle::binary_rd_hamming(0.3, 0.0) == doctest::Approx(0.881290899230693));
}

TEST_CASE("worst-case side information for a uniform bit is h(D) - h(De)") {
  CHECK(near(oracle::binary_blur_hamming(0.5, 0.25, 0.1), 0.342282, 1e-6));
  CHECK(near(oracle::binary_blur_hamming(0.5, 0.25, 0.25), 0.0, 1e-12));
}

TEST_CASE("grid minimizer brackets a parabola") {
  auto [f, x] = oracle::grid_min_1d([](double t) { return (t - 0.3) * (t - 0.3) + 1; }, 0, 1, 0.01);
  CHECK(near(x, 0.3, 1e-9));
  CHECK(near(f, 1, 1e-12));
}

TEST_CASE("brute conditional RD on degenerate joints") {
  // Y = X: the side information already reveals X.
  Joint2 same(2, 2, {0.4, 0, 0, 0.6});
  CHECK(near(oracle::brute_conditional_rd_binary(same, DistortionSpec::hamming(2, 0.1)), 0, 1e-9));
  // Y independent of a uniform X: the plain binary value 1 - h(De).
  Joint2 indep(2, 2, {0.25, 0.25, 0.25, 0.25});
  CHECK(near(oracle::brute_conditional_rd_binary(indep, DistortionSpec::hamming(2, 0.1)), 0.531004, 5e-4));
}

TEST_CASE("exhaustive set cover") {
  // Rows: elements; columns: sets. Element 2 is only in set 2.
  std::vector<std::vector<bool>> m = {{true, false, false}, {true, true, false}, {false, false, true}};
  CHECK(oracle::exhaustive_min_cover(m) == 2);
  std::vector<std::vector<bool>> one = {{true, true}, {true, false}};
  CHECK(oracle::exhaustive_min_cover(one) == 1);
}

TEST_CASE("count tables") {
  auto t = oracle::all_count_tables(3, 2);
  CHECK(t.size() == 4);  // C(4, 1)
  for (const auto& c : t) CHECK(std::accumulate(c.begin(), c.end(), 0) == 3);
  CHECK(oracle::all_count_tables(4, 8).size() == 330);  // C(11, 7)
}

TEST_CASE("suite registry") {
  auto suites = verify::list_suites();
  CHECK(suites.size() >= 14);
  bool has_lemma3 = false;
  for (const auto& s : suites) has_lemma3 = has_lemma3 || s.name == "lemma3";
  CHECK(has_lemma3);
  auto r = verify::run_suite("blind");
  REQUIRE(!r.empty());
  for (const auto& c : r) CHECK(c.pass());
}
