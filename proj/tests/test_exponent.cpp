#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "secexp/error.hpp"
#include "secexp/exponent.hpp"
#include "secexp/oracle.hpp"
#include "secexp/rng.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace secexp;

namespace {

double hb(double q) {
  if (q <= 0 || q >= 1) return 0;
  return -q * std::log2(q) - (1 - q) * std::log2(1 - q);
}

double kl2(double q, double p) {
  double d = 0;
  if (q > 0) d += q * std::log2(q / p);
  if (q < 1) d += (1 - q) * std::log2((1 - q) / (1 - p));
  return d;
}

DistortionSpec ham(double level) { return DistortionSpec::hamming(2, level); }
DistortionSpec zero_d() { return DistortionSpec::constant(2, 2, 0.0, 0.0); }

}  // namespace

TEST_CASE("closed_form_binary branches") {
  CHECK(near(closed_form_binary(0.5, 0.25, 0.1), 0.342282));
  CHECK(closed_form_binary(0.05, 0.25, 0.1) == 0.0);
  CHECK(near(closed_form_binary(0.15, 0.25, 0.1), 0.140844));
  CHECK_THROWS_AS(closed_form_binary(0.0, 0.25, 0.1), ValidationError);
  CHECK_THROWS_AS(closed_form_binary(0.3, 0.1, 0.25), ValidationError);
  CHECK_THROWS_AS(closed_form_binary(0.3, 0.5, 0.1), ValidationError);
}

TEST_CASE("r_blur examples") {
  CHECK(near(r_blur(Dist::bernoulli(0.5), ham(0.25), ham(0.1)).value, 0.342282, 1e-4));
  CHECK(near(r_blur(Dist::bernoulli(0.5), zero_d(), ham(0.1)).value, 0.531004, 1e-4));
  CHECK(r_blur(Dist::bernoulli(0.05), ham(0.25), ham(0.1)).value < 1e-4);
}

TEST_CASE("r_blur matches the binary closed form on a grid") {
  for (double q : {0.1, 0.2, 0.3, 0.4})
    for (double D : {0.15, 0.35})
      for (double De : {0.05, D}) {
        double v = r_blur(Dist::bernoulli(q), ham(D), ham(De)).value;
        CHECK(near(v, oracle::binary_blur_hamming(q, D, De), 1e-3));
      }
}

TEST_CASE("r_blur_rate examples") {
  CHECK(near(r_blur_rate(Dist::bernoulli(0.5), 1.0, ham(0.25), ham(0.1)).value, 0.342282, 1e-4));
  // Eavesdropper must reproduce exactly: H(Q) - R(Q, D).
  CHECK(near(r_blur_rate(Dist::bernoulli(0.3), 1.0, ham(0.25), ham(0.0)).value,
             hb(0.3) - (hb(0.3) - hb(0.25)), 2e-3));
  // At R = R(p, D) only the rate-distortion channel is left.
  Dist p = Dist::bernoulli(0.4);
  double r = rd_function(p, ham(0.2)).value;
  double re = rd_function(p, ham(0.05)).value;
  CHECK(r_blur_rate(p, r, ham(0.2), ham(0.05)).value >= re - r - 1e-3);
  CHECK_THROWS_AS(r_blur_rate(p, r - 0.05, ham(0.2), ham(0.05)), ValidationError);
}

TEST_CASE("r_blur rejects infeasible levels") {
  DistortionSpec d(2, 2, std::vector<double>{0.2, 1, 1, 0.2}, 0.1);
  CHECK_THROWS_AS(r_blur(Dist::bernoulli(0.5), d, ham(0.1)), ValidationError);
  CHECK_THROWS_AS(r_blur(Dist::bernoulli(0.5), ham(0.1), d), ValidationError);
}

TEST_CASE("property: sandwich and rate monotonicity on ternary instances") {
  Rng rng(77);
  for (int i = 0; i < 6; ++i) {
    Dist p = Dist::normalize(rng.dirichlet(3));
    std::vector<double> m(9), me(9);
    for (auto& v : m) v = std::round(rng.uniform() * 4) / 4;
    for (auto& v : me) v = std::round(rng.uniform() * 4) / 4;
    DistortionSpec d0(3, 3, m, 0.0), e0(3, 3, me, 0.0);
    auto d = d0.with_level(d0.d_min() + 0.4 * (d0.d_max() - d0.d_min()));
    auto e = e0.with_level(e0.d_min() + 0.2 * (e0.d_max() - e0.d_min()));
    double r = rd_function(p, d).value, re = rd_function(p, e).value;
    SearchOptions opt;
    opt.random_starts = 6;
    auto free = r_blur(p, d, e, opt);
    CHECK(free.value >= std::max(0.0, re - r) - 1e-3);
    CHECK(free.value <= re + 1e-3);
    auto lo = r_blur_rate(p, r + 0.05, d, e, opt);
    auto hi = r_blur_rate(p, r + 0.3, d, e, opt, &lo.argmax_channel);
    CHECK(lo.value <= hi.value + 1e-3);
    CHECK(hi.value <= free.value + 1e-3);
    CHECK(expected_distortion(Joint2::compose(p, free.argmax_channel), d) <= d.level() + 1e-6);
  }
}

TEST_CASE("exponent_perfect examples") {
  CHECK(near(exponent_perfect(Dist::bernoulli(0.5), ham(0.1)).value, 0.531004, 1e-5));
  CHECK(exponent_perfect(Dist({0.2, 0.3, 0.5}), DistortionSpec::hamming(3, 1.0)).value < 1e-9);
  auto oracle = oracle::grid_min_1d(
      [](double q) { return kl2(q, 0.8) + std::max(0.0, hb(q) - hb(0.1)); }, 0.0, 1.0, 1e-4);
  auto r = exponent_perfect(Dist::bernoulli(0.8), ham(0.1));
  CHECK(near(r.value, oracle.first, 1e-5));
  CHECK(r.value <= oracle.first + 1e-7);
  CHECK(r.branch == "perfect");
}

TEST_CASE("exponent_nokey examples") {
  auto a = exponent_nokey(Dist::bernoulli(0.5), zero_d(), ham(0.1));
  CHECK(near(a.value, 0.531004, 1e-4));
  auto b = exponent_nokey(Dist::bernoulli(0.5), ham(0.25), ham(0.25));
  CHECK(b.value < 1e-4);
  CHECK(b.diagnostics["divergence"] < 1e-4);
  CHECK_THROWS_AS(exponent_nokey(Dist({1.0, 0.0}), ham(0.25), ham(0.1)), ValidationError);
}

TEST_CASE("exponent_key examples") {
  for (double r : {0.1, 0.3}) {
    auto e = exponent_key(Dist::bernoulli(0.5), ham(0.25), ham(0.1), 1.0, r, kInf);
    double expect = std::min(0.531004, r + 0.342282);
    CHECK(near(e.value, expect, 2e-3));
    CHECK(e.diagnostics["split_gap"] <= 2e-3);
    CHECK(e.value <= e.diagnostics["perfect_exponent"] + 1e-9);
  }
  auto e = exponent_key(Dist::bernoulli(0.5), ham(0.25), ham(0.1), 1.0, 0.3, kInf);
  CHECK(e.branch == "perfect");
}

TEST_CASE("exponent_key rejects rates at or below R_alpha") {
  try {
    exponent_key(Dist::bernoulli(0.5), ham(0.25), ham(0.1), 0.15, 0.1, kInf);
    FAIL("expected a validation error");
  } catch (const ValidationError& err) {
    CHECK(std::string(err.what()).find("R_alpha") != std::string::npos);
  }
  CHECK_THROWS_AS(exponent_key(Dist::bernoulli(0.5), ham(0.25), ham(0.1), 1.0, -0.1, kInf),
                  ValidationError);
  CHECK_THROWS_AS(exponent_key(Dist::bernoulli(0.5), ham(0.25), ham(0.1), 1.0, 0.1, 0.0),
                  ValidationError);
}

TEST_CASE("exponent_key with a finite alpha stays below the perfect exponent") {
  Dist p = Dist::bernoulli(0.3);
  double prev = -1;
  for (double r : {0.0, 0.05, 0.2}) {
    auto e = exponent_key(p, ham(0.2), ham(0.05), 1.0, r, 0.05);
    CHECK(e.value <= e.diagnostics["perfect_exponent"] + 1e-3);
    CHECK(e.value >= prev - 1e-3);
    CHECK(e.diagnostics["split_gap"] <= 2e-3);
    prev = e.value;
  }
}

TEST_CASE("min_key_rate examples") {
  CHECK(near(min_key_rate(Dist::bernoulli(0.5), ham(0.25), ham(0.1), 1.0, kInf), 0.188722, 2e-3));
  CHECK(min_key_rate(Dist::bernoulli(0.5), zero_d(), zero_d(), 1.0, kInf) < 1e-9);
}

TEST_CASE("compute_R_alpha examples") {
  CHECK(near(compute_R_alpha(Dist::bernoulli(0.3), ham(0.25), kInf), 0.188722, 1e-5));
  CHECK(near(compute_R_alpha(Dist::bernoulli(0.3), ham(0.25), 0.0), hb(0.3) - hb(0.25), 1e-7));
  double tiny = compute_R_alpha(Dist::bernoulli(0.3), ham(0.25), 1e-6);
  auto oracle = oracle::grid_min_1d(
      [](double q) { return kl2(q, 0.3) <= 1e-6 ? -oracle::binary_rd_hamming(q, 0.25) : 1.0; },
      0.29, 0.31, 1e-6);
  CHECK(near(tiny, -oracle.first, 1e-5));
  CHECK(near(tiny, 0.070013, 1e-3));
  CHECK_THROWS_AS(compute_R_alpha(Dist::bernoulli(0.3), ham(0.25), -1.0), ValidationError);
}

TEST_CASE("compute_R_alpha on a ternary source") {
  Dist p({0.6, 0.3, 0.1});
  auto d = DistortionSpec::hamming(3, 0.2);
  double v = compute_R_alpha(p, d, 0.1);
  double base = rd_function(p, d).value;
  CHECK(v >= base - 1e-9);
  CHECK(v <= rd_function(Dist::uniform(3), d).value + 1e-6);
  CHECK(near(compute_R_alpha(p, d, kInf), rd_function(Dist::uniform(3), d).value, 1e-3));
}

TEST_CASE("successive_refinability_probe") {
  auto rep = successive_refinability_probe(Dist::bernoulli(0.5), ham(0.25), ham(0.1));
  CHECK(rep.refinable);
  CHECK(rep.rd_channel_near_optimal);
  CHECK(rep.markov_defect < 1e-4);
  auto triv = successive_refinability_probe(Dist::bernoulli(0.5), zero_d(), ham(0.1));
  CHECK(triv.refinable);
  CHECK(near(triv.value, triv.re, 1e-3));
}
