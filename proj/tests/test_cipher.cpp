#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "secexp/cipher.hpp"
#include "secexp/error.hpp"
#include "secexp/oracle.hpp"
#include "secexp/rd.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace secexp;

namespace {

DistortionSpec ham_q(const char* level) { return DistortionSpec::hamming(2, parse_rational(level)); }

// Brute-force MAP success in doubles: for every y, max over v of the
// probability mass of {x : f(x) = y, x in B(v)}.
double brute_map(const BlurSystem& s) {
  const int n = s.n;
  const std::uint64_t X = s.encoder.size();
  const std::uint64_t V = static_cast<std::uint64_t>(std::pow(s.spec_e.cols(), n));
  std::map<std::uint64_t, std::vector<std::uint64_t>> by_y;
  for (std::uint64_t x = 0; x < X; ++x) by_y[s.encoder[x]].push_back(x);
  auto prob = [&](std::uint64_t x) {
    double pr = 1;
    for (int a : decode_seq(x, n, s.nx)) pr *= s.source.probs()[a];
    return pr;
  };
  double total = 0;
  for (const auto& [y, xs] : by_y) {
    double best = 0;
    for (std::uint64_t v = 0; v < V; ++v) {
      Seq vs = decode_seq(v, n, s.spec_e.cols());
      double m = 0;
      for (auto x : xs)
        if (ball_membership(decode_seq(x, n, s.nx), vs, s.spec_e)) m += prob(x);
      best = std::max(best, m);
    }
    total += best;
  }
  return total;
}

}  // namespace

TEST_CASE("single letter identity encoder is always guessed") {
  BlurSystem s = build_blur_system(Dist({0.3, 0.7}), 1, ham_q("0"), ham_q("0"));
  CHECK(encoder_violations(s) == 0);
  CHECK(map_adversary(s).exact == Rational(1));
}

TEST_CASE("zero distortion forces the identity map") {
  BlurSystem s = build_blur_system(Dist({0.25, 0.75}), 5, ham_q("0"), ham_q("1/5"));
  for (std::uint64_t x = 0; x < s.encoder.size(); ++x) CHECK(s.encoder[x] == x);
  AdversaryReport r = map_adversary(s);
  CHECK(r.exact == Rational(1));
  CHECK(r.empirical_exponent == doctest::Approx(0.0));
}

TEST_CASE("constant encoder success matches the binomial tail") {
  // p(1) = 1/5; the best guess is all zeros and success is Pr(Bin(n, 1/5) <= floor(n D_e)).
  for (int n : {4, 7, 10}) {
    BlurSystem s = make_constant_blur_system(Dist({0.8, 0.2}), n, ham_q("1"), ham_q("1/5"));
    CHECK(s.kind == "constant");
    AdversaryReport r = map_adversary(s);
    Rational want = oracle::binomial_cdf(n, n / 5, Rational(1, 5));
    CHECK(r.exact == want);
  }
  CHECK_THROWS_AS(make_constant_blur_system(Dist({0.5, 0.5}), 4, ham_q("1/4"), ham_q("0")), ValidationError);
}

TEST_CASE("exact MAP agrees with brute force") {
  for (int n : {3, 5, 6}) {
    BlurSystem s = build_blur_system(Dist({0.7, 0.3}), n, ham_q("1/3"), ham_q("1/6"));
    CHECK(encoder_violations(s) == 0);
    AdversaryReport r = map_adversary(s);
    REQUIRE(r.exact);
    CHECK(near(r.success, brute_map(s), 1e-12));
    double per_type = 0;
    for (const auto& [t, v] : r.per_type) per_type += v;
    CHECK(near(per_type, r.success, 1e-12));
  }
  // Ternary source and reconstruction, generic ball path.
  DistortionSpec d3 = DistortionSpec::hamming(3, parse_rational("1/2"));
  DistortionSpec e3 = DistortionSpec::hamming(3, parse_rational("1/4"));
  BlurSystem s = build_blur_system(Dist({0.5, 0.3, 0.2}), 4, d3, e3);
  CHECK(near(map_adversary(s).success, brute_map(s), 1e-12));
}

TEST_CASE("a genie revealing the type never hurts") {
  BlurSystem s = build_blur_system(Dist({0.6, 0.4}), 6, ham_q("1/3"), ham_q("1/6"));
  AdversaryReport m = map_adversary(s), g = genie_map_adversary(s);
  CHECK(*g.exact >= *m.exact);
  CHECK(g.diagnostics.at("messages") >= m.diagnostics.at("messages"));
}

TEST_CASE("exact MAP ties go to the lowest v") {
  ObservationModel model;
  model.n = 2;
  model.nx = 2;
  model.messages = {{{0b01, Rational(1, 2)}, {0b10, Rational(1, 2)}}};
  MapOutcome mo = exact_map(model, ham_q("0"));
  CHECK(mo.total == Rational(1, 2));
  CHECK(mo.argmax_v[0] == 0b01);
}

TEST_CASE("two-stage adversary is dominated by MAP and meets the per-pair bound") {
  BlurSystem s = build_blur_system(Dist({0.5, 0.5}), 6, ham_q("1/3"), ham_q("1/6"));
  AdversaryReport ts = two_stage_adversary(s);
  AdversaryReport mp = map_adversary(s);
  REQUIRE(ts.exact);
  CHECK(*ts.exact <= *mp.exact);
  CHECK(*ts.exact > 0);
  CHECK(ts.diagnostics.at("bound_exponent") == 12);
  CHECK(ts.diagnostics.at("bound_pairs") == 64);
  CHECK(ts.diagnostics.at("bound_violations") == 0);

  TwoStageOptions tight;
  tight.bound_exponent = 8;
  AdversaryReport t8 = two_stage_adversary(s, tight);
  CHECK(t8.exact == ts.exact);
  CHECK(t8.diagnostics.at("bound_min_margin_log2") ==
        doctest::Approx(ts.diagnostics.at("bound_min_margin_log2") - 4 * std::log2(7.0)));
}

TEST_CASE("two-stage sampling agrees with the exact value") {
  BlurSystem s = build_blur_system(Dist({0.5, 0.5}), 5, ham_q("1/5"), ham_q("1/5"));
  AdversaryReport ex = two_stage_adversary(s);
  TwoStageOptions mc;
  mc.exact_budget = 0;
  mc.mc_samples = 100000;
  AdversaryReport sm = two_stage_adversary(s, mc);
  CHECK(sm.monte_carlo);
  CHECK_FALSE(sm.exact);
  CHECK(std::fabs(sm.success - ex.success) <= 2 * sm.ci_radius);
}

TEST_CASE("blind guessing matches the binomial tail") {
  AdversaryReport r = blind_adversary(Dist({0.2, 0.8}), 10, ham_q("1/10"));
  CHECK(r.exact == oracle::binomial_cdf(10, 1, Rational(1, 5)));
  CHECK(r.diagnostics.at("argmax_v_count_1") == 10);
  // Exponent stays above 1 - h(D_e) for the uniform source.
  for (int n : {4, 8, 12}) {
    AdversaryReport u = blind_adversary(Dist({0.5, 0.5}), n, ham_q("1/4"));
    CHECK(u.empirical_exponent >= 1 - 0.811278 - 1e-6);
  }
}

TEST_CASE("exponent trend flags") {
  Trend t = exponent_trend([](int n) { return blind_adversary(Dist({0.5, 0.5}), n, ham_q("1/4")); },
                           {4, 8}, 0.188722);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].exact == oracle::binomial_cdf(4, 1, Rational(1, 2)));
  CHECK_FALSE(t.exponent_increasing);  // 0.4195 then 0.349
  CHECK_FALSE(t.below_theory);
}

TEST_CASE("keyed system with zero key rate") {
  KeyedOptions opt;
  opt.seed = 3;
  KeyedSystem s = build_keyed_system(Dist({0.5, 0.5}), 6, ham_q("1/3"), ham_q("1/6"), 1.5, 0.0,
                                     kInf, 0.0, opt);
  CHECK(s.num_keys == 1);
  CHECK(s.dummy_mass == 0);
  CHECK(s.message_bits <= 9);
  // Messages round-trip and every non-flagged codeword meets the distortion level.
  const ScaledCosts sc = scaled_costs(s.spec_d, s.n);
  for (std::uint64_t x = 0; x < 64; ++x) {
    Seq xs = decode_seq(x, 6, 2);
    EncoderLaw law = keyed_encoder_law(s, xs, 0);
    REQUIRE(law.type_id >= 1);
    Rational tot = 0;
    for (const auto& [i, pr] : law.law) {
      tot += pr;
      auto [tid, idx] = decode_message(s, encode_message(s, law.type_id, i));
      CHECK(tid == law.type_id);
      CHECK(idx == i);
      if (s.books[tid - 1].event_E_flags[0]) continue;
      Seq y = keyed_decode(s, tid, idx, 0);
      long long c = 0;
      for (int k = 0; k < 6; ++k) c += sc.at(xs[k], y[k]);
      CHECK(c <= sc.level);
    }
    CHECK(tot == 1);
  }
  AdversaryReport r = keyed_map_adversary(s);
  REQUIRE(r.exact);
  CHECK(*r.exact > 0);
  CHECK(*r.exact <= 1);
  CHECK_FALSE(r.message_bounds.empty());
}

TEST_CASE("keyed system bookkeeping") {
  KeyedOptions opt;
  opt.seed = 1;
  KeyedSystem s = build_keyed_system(Dist({0.5, 0.5}), 8, ham_q("1/4"), ham_q("1/8"), 1.5, 0.25,
                                     kInf, 0.0, opt);
  CHECK(s.num_keys == 4);
  CHECK(s.types.size() == 9);
  CHECK(s.type_bits == 4);
  CHECK(s.message_bits <= 12);
  for (const auto& kb : s.books) CHECK(kb.books.size() == 4);

  AdversaryReport km = keyed_map_adversary(s);
  REQUIRE(km.exact);
  AdversaryReport kg = key_guess_adversary(s);
  REQUIRE(kg.exact);
  CHECK(kg.diagnostics.at("correct_key_share_holds") == 1.0);
  CHECK(kg.success * s.num_keys >= kg.diagnostics.at("correct_key_success") - 1e-12);

  // Deterministic for a fixed seed.
  KeyedSystem s2 = build_keyed_system(Dist({0.5, 0.5}), 8, ham_q("1/4"), ham_q("1/8"), 1.5, 0.25,
                                      kInf, 0.0, opt);
  CHECK(keyed_map_adversary(s2).exact == km.exact);
}

TEST_CASE("keyed system rejects an oversized message set and excess dummy mass") {
  CHECK_THROWS_AS(build_keyed_system(Dist({0.5, 0.5}), 6, ham_q("1/3"), ham_q("1/6"), 0.3, 0.0, kInf,
                                     0.0),
                  ValidationError);
  // Only the type (3,3) coded: the dummy mass 1 - 20/64 is far above 2^{-6}.
  std::map<TypeVec, KeyedCodebooks> books;
  TypeVec q({3, 3});
  JointTypeVec jt({2, 2}, {3, 0, 0, 3});
  KeyedCodebookOptions ko;
  ko.allow_persistent = true;
  books.emplace(q, keyed_codebooks(jt, 0.0, 0.5, 1, ko));
  CHECK_THROWS_AS(assemble_keyed_system(Dist({0.5, 0.5}), 6, ham_q("1/3"), ham_q("1/6"), 2.0, 0.0, 1.0,
                                        0.0, books),
                  ValidationError);
  KeyedSystem ok = assemble_keyed_system(Dist({0.5, 0.5}), 6, ham_q("1/3"), ham_q("1/6"), 2.0, 0.0,
                                         kInf, 0.0, books);
  CHECK(ok.dummy_mass == Rational(11, 16));
  CHECK(keyed_decode(ok, 0, 0, 0) == Seq(6, 0));
}

TEST_CASE("guards") {
  CHECK_THROWS_AS(build_blur_system(Dist({0.5, 0.5}), 21, ham_q("1/4"), ham_q("1/8")), GuardError);
  CHECK_THROWS_AS(build_blur_system(Dist({0.5, 0.5}), 0, ham_q("1/4"), ham_q("1/8")), ValidationError);
}
