#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "secexp/error.hpp"
#include "secexp/oracle.hpp"
#include "secexp/rd.hpp"
#include "secexp/rng.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace secexp;

namespace {

double hb(double q) {
  if (q <= 0 || q >= 1) return 0;
  return -q * std::log2(q) - (1 - q) * std::log2(1 - q);
}

// Binary source, Hamming distortion: R = [h(p) - h(D)]^+ for D < min(p, 1-p).
double binary_rd(double p1, double D) {
  double m = std::min(p1, 1 - p1);
  return D >= m ? 0.0 : hb(p1) - hb(D);
}

Joint2 random_joint(Rng& rng, std::size_t nx, std::size_t ny) {
  return Joint2(nx, ny, Dist::normalize(rng.dirichlet(nx * ny)).probs());
}

DistortionSpec random_spec(Rng& rng, std::size_t nx, std::size_t nv) {
  std::vector<double> m(nx * nv);
  for (auto& v : m) v = std::round(rng.uniform() * 8) / 8;
  DistortionSpec s(nx, nv, m, 0.0);
  double lo = s.d_min(), hi = s.d_max();
  return s.with_level(lo + (hi - lo) * (0.05 + 0.6 * rng.uniform()));
}

}  // namespace

TEST_CASE("rd_function examples") {
  auto r = rd_function(Dist({0.5, 0.5}), DistortionSpec::hamming(2, 0.25));
  CHECK(near(r.value, 0.188722));
  CHECK(r.achieved_distortion <= 0.25 + 1e-7);
  CHECK(r.converged);
  CHECK(rd_function(Dist({0.3, 0.7}), DistortionSpec::hamming(2, 1.0)).value == 0.0);
  CHECK(near(rd_function(Dist({0.5, 0.5}), DistortionSpec::hamming(2, 0.0)).value, 1.0, 1e-9));
  auto d = DistortionSpec(2, 2, std::vector<double>{0, 2, 3, 1}, 3.0);
  CHECK(rd_function(Dist({0.2, 0.8}), d).value == 0.0);
}

TEST_CASE("rd_function matches the binary formula") {
  for (double p : {0.1, 0.2, 0.3, 0.45, 0.5})
    for (double D : {0.0, 0.01, 0.05, 0.1, 0.2, 0.3, 0.4}) {
      auto r = rd_function(Dist::bernoulli(p), DistortionSpec::hamming(2, D));
      CHECK(near(r.value, binary_rd(p, D), 1e-6));
    }
}

TEST_CASE("rd_function rejects levels below d_min") {
  auto d = DistortionSpec(2, 2, std::vector<double>{0, 2, 3, 1}, 0.5);
  CHECK_THROWS_AS(rd_function(Dist({0.5, 0.5}), d), ValidationError);
}

TEST_CASE("distortion_rate examples and inverse consistency") {
  auto ham = DistortionSpec::hamming(2, 0.0);
  CHECK(near(distortion_rate(Dist({0.5, 0.5}), ham, 1.0), 0.0, 1e-9));
  CHECK(near(distortion_rate(Dist({0.5, 0.5}), ham, 0.0), 0.5, 1e-12));
  CHECK(near(distortion_rate(Dist({0.5, 0.5}), ham, 0.188722), 0.25, 1e-5));
  Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    Dist p = Dist::normalize(rng.dirichlet(3));
    auto spec = random_spec(rng, 3, 3);
    auto r = rd_function(p, spec);
    if (r.value < 1e-4) continue;
    CHECK(near(distortion_rate(p, spec, r.value), spec.level(), 1e-4));
  }
}

TEST_CASE("min_distortion_levels examples") {
  CHECK(min_distortion_levels(DistortionSpec::hamming(2, 0)) == std::pair<double, double>(0, 1));
  CHECK(min_distortion_levels(DistortionSpec(2, 2, std::vector<double>{0, 2, 3, 1}, 1)) ==
        std::pair<double, double>(1, 3));
  CHECK(min_distortion_levels(DistortionSpec::constant(2, 3, 0.7, 0.7)) ==
        std::pair<double, double>(0.7, 0.7));
}

TEST_CASE("conditional_rd examples") {
  auto ham = [](double De) { return DistortionSpec::hamming(2, De); };
  Joint2 ident(2, 2, {0.5, 0, 0, 0.5});
  for (double De : {0.0, 0.1, 0.4}) CHECK(conditional_rd(ident, ham(De)).value < 1e-9);
  Joint2 indep = Joint2::product(Dist::uniform(2), Dist({0.3, 0.7}));
  CHECK(near(conditional_rd(indep, ham(0.1)).value, 0.531004));
  Rng rng(9);
  for (int i = 0; i < 5; ++i) {
    Joint2 j = random_joint(rng, 2, 3);
    CHECK(conditional_rd(j, ham(1.0)).value == 0.0);
  }
  CHECK_THROWS_AS(conditional_rd(ident, DistortionSpec(2, 2, std::vector<double>{0, 2, 3, 1}, 0.5)),
                  ValidationError);
}

TEST_CASE("conditional_rd corner at d_min solves the restricted problem") {
  // Hamming at D_e = 0: V must equal X, so the value is H(X|Y).
  Rng rng(13);
  for (int i = 0; i < 20; ++i) {
    Joint2 j = random_joint(rng, 3, 2);
    auto r = conditional_rd(j, DistortionSpec::hamming(3, 0.0));
    CHECK(near(r.value, conditional_entropy_x_given_y(j), 1e-8));
    CHECK(r.achieved_distortion <= 1e-12);
  }
}

TEST_CASE("conditional_rd skips zero-probability slices") {
  Joint2 j(2, 3, {0.25, 0.0, 0.25, 0.25, 0.0, 0.25});
  auto r = conditional_rd(j, DistortionSpec::hamming(2, 0.1));
  CHECK(near(r.value, 1 - hb(0.1), 1e-6));
  CHECK(r.per_y_slopes[1] == 0.0);
}

TEST_CASE("property: conditional_rd bounded by R_e, monotone and convex in D_e") {
  Rng rng(21);
  for (int i = 0; i < 60; ++i) {
    std::size_t nx = 2 + i % 3, ny = 1 + i % 3, nv = 2 + (i / 3) % 3;
    Joint2 j = random_joint(rng, nx, ny);
    auto spec = random_spec(rng, nx, nv);
    double lo = spec.d_min(), hi = spec.d_max();
    double a = lo + (hi - lo) * rng.uniform(), b = lo + (hi - lo) * rng.uniform();
    if (a > b) std::swap(a, b);
    double ca = conditional_rd(j, spec.with_level(a)).value;
    double cb = conditional_rd(j, spec.with_level(b)).value;
    double cm = conditional_rd(j, spec.with_level(0.5 * (a + b))).value;
    double re = rd_function(j.marginal_x(), spec.with_level(a)).value;
    CHECK(ca >= 0);
    CHECK(ca <= re + 1e-6);
    CHECK(ca >= cb - 1e-8);
    CHECK(cm <= 0.5 * (ca + cb) + 1e-6);
  }
}

TEST_CASE("property: conditional_rd is continuous in the joint law") {
  Rng rng(33);
  for (int i = 0; i < 100; ++i) {
    std::size_t nx = 2 + i % 2, ny = 2 + (i / 2) % 2;
    auto w = rng.dirichlet(nx * ny);
    auto spec = random_spec(rng, nx, nx);
    // Move total-variation mass 1e-3 between two cells.
    auto u = w;
    std::size_t from = rng.below(w.size()), to = (from + 1) % w.size();
    double m = std::min(1e-3, u[from]);
    u[from] -= m;
    u[to] += m;
    double a = conditional_rd(Joint2(nx, ny, Dist::normalize(w).probs()), spec).value;
    double b = conditional_rd(Joint2(nx, ny, Dist::normalize(u).probs()), spec).value;
    CHECK(std::fabs(a - b) < 0.05);
  }
}

TEST_CASE("conditional_rd agrees with the brute-force minimizer on binary instances") {
  Rng rng(101);
  for (int i = 0; i < 8; ++i) {
    auto inst = oracle::random_binary_crd_instance(rng);
    double fast = conditional_rd(inst.joint, inst.spec_e).value;
    double slow = oracle::brute_conditional_rd_binary(inst.joint, inst.spec_e);
    CHECK(near(fast, slow, 5e-3));
    CHECK(fast <= slow + 1e-6);
  }
}

TEST_CASE("straight piece of the curve: the solution meets the level and R is linear") {
  // At one slope two output laws tie, so R(D) is affine between their
  // distortions (about 0.0804 and 0.1526).
  Dist p({0.740912, 0.259088});
  auto at = [&](double D) {
    return rd_function(p, DistortionSpec(2, 4, {0, 1, 0.25, 1, 1, 0, 0.25, 0.5}, D));
  };
  const double levels[] = {0.1, 0.105, 0.12, 0.13, 0.1385, 0.15};
  for (double D : levels) {
    auto r = at(D);
    CHECK(r.converged);
    CHECK(near(r.achieved_distortion, D, 1e-6));
  }
  double r1 = at(0.1).value, r2 = at(0.125).value, r3 = at(0.15).value;
  CHECK(near(r2, 0.5 * (r1 + r3), 1e-6));
}
