#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "secexp/error.hpp"
#include "secexp/exponent.hpp"
#include "secexp/oracle.hpp"
#include "secexp/types.hpp"
#include "test_util.hpp"

#include <cmath>
#include <set>

using namespace secexp;

namespace {

DistortionSpec ham(double level) { return DistortionSpec::hamming(2, level); }
DistortionSpec ham_q(const char* level) { return DistortionSpec::hamming(2, parse_rational(level)); }

std::vector<Seq> all_seqs(int n, int k) {
  std::vector<Seq> out;
  for (std::uint64_t c = 0; c < static_cast<std::uint64_t>(std::pow(k, n)); ++c)
    out.push_back(decode_seq(c, n, k));
  return out;
}

// Exact E[d] <= D on a count table, in rationals.
bool within(const std::vector<int>& counts, std::size_t cols, const DistortionSpec& d, int n,
            std::size_t stride = 1) {
  Rational s = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    std::size_t cell = i / stride;
    s += Rational(counts[i]) * d.exact(cell / cols, (stride == 1 ? cell % cols : i % stride));
  }
  return s <= d.exact_level() * n;
}

// Brute-force pstar value: every count table over X x Y x V with the right
// X x Y marginal, distortion checked in rationals, objective via Joint3.
double brute_pstar(const JointTypeVec& jt, const DistortionSpec& de) {
  const std::size_t nx = jt.dims()[0], ny = jt.dims()[1], nv = de.cols();
  double best = kInf;
  for (const auto& t : oracle::all_count_tables(jt.n(), static_cast<int>(nx * ny * nv))) {
    bool ok = true;
    Rational s = 0;
    for (std::size_t x = 0; x < nx && ok; ++x)
      for (std::size_t y = 0; y < ny && ok; ++y) {
        int m = 0;
        for (std::size_t v = 0; v < nv; ++v) {
          int c = t[(x * ny + y) * nv + v];
          m += c;
          s += Rational(c) * de.exact(x, v);
        }
        ok = m == jt(x, y);
      }
    if (!ok || s > de.exact_level() * jt.n()) continue;
    std::vector<double> p(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) p[i] = static_cast<double>(t[i]) / jt.n();
    best = std::min(best, conditional_mutual_information(Joint3(nx, ny, nv, p)));
  }
  return best;
}

}  // namespace

TEST_CASE("enum_types examples and counts") {
  auto t = enum_types(2, 2);
  REQUIRE(t.size() == 3);
  CHECK(t[0].counts() == std::vector<int>{0, 2});
  CHECK(t[1].counts() == std::vector<int>{1, 1});
  CHECK(t[2].counts() == std::vector<int>{2, 0});
  CHECK(enum_types(1, 1).size() == 1);
  CHECK(enum_types(4, 3).size() == 15);
  CHECK_THROWS_AS(enum_types(200, 6), GuardError);
  CHECK_THROWS_AS(enum_types(0, 2), ValidationError);
}

TEST_CASE("type_class_size examples and the counting identity") {
  CHECK(type_class_size(TypeVec({2, 2})) == 6);
  CHECK(type_class_size(TypeVec({4, 0})) == 1);
  CHECK(type_class_size(TypeVec({3, 2, 1})) == 60);
  for (int k = 1; k <= 3; ++k)
    for (int n = 1; n <= 12; ++n) {
      BigInt total = 0;
      for (const auto& t : enum_types(n, k)) {
        BigInt s = type_class_size(t);
        total += s;
        double h = entropy(t.dist());
        double ls = log2_big(s);
        CHECK(ls <= n * h + 1e-9);
        CHECK(ls >= n * h - k * std::log2(n + 1.0) - 1e-9);
      }
      BigInt kn;
      mpz_ui_pow_ui(kn.get_mpz_t(), k, n);
      CHECK(total == kn);
    }
}

TEST_CASE("joint types given a marginal") {
  CHECK(joint_types_given_marginal_x(TypeVec({2, 2}), 2, ham(0)).size() == 1);
  CHECK(joint_types_given_marginal_x(TypeVec({2, 2}), 2, ham(1)).size() == 9);
  CHECK(joint_types_given_marginal_x(TypeVec({4, 0}), 2, ham(0.25)).size() == 2);
  CHECK(joint_types_given_marginal_y(TypeVec({2, 2}), 2, ham(0)).size() == 1);
  CHECK(joint_types_given_marginal_y(TypeVec({2, 2}), 2, ham(1)).size() == 9);
  CHECK(joint_types_given_marginal_y(TypeVec({4, 0}), 2, ham(0.25)).size() == 2);
}

TEST_CASE("joint types agree with sequence-pair enumeration") {
  // Every distinct joint type of (x, y) pairs with x of the given type.
  DistortionSpec d(2, 3, std::vector<Rational>{0, Rational(1, 2), 1, 1, Rational(1, 3), 0},
                   Rational(1, 3));
  for (int n = 2; n <= 5; ++n)
    for (const auto& q : enum_types(n, 2)) {
      std::set<std::vector<int>> seen;
      for (const auto& x : all_seqs(n, 2)) {
        if (!(type_of(x, 2) == q)) continue;
        for (const auto& y : all_seqs(n, 3)) {
          auto jt = joint_type_of(x, y, 2, 3);
          if (within(jt.counts(), 3, d, n)) seen.insert(jt.counts());
        }
      }
      auto got = joint_types_given_marginal_x(q, 3, d);
      std::set<std::vector<int>> mine;
      for (const auto& jt : got) mine.insert(jt.counts());
      CHECK(mine == seen);
      CHECK(std::is_sorted(got.begin(), got.end()));
    }
}

TEST_CASE("pstar_n examples") {
  JointTypeVec diag({2, 2}, {2, 0, 0, 2});
  auto e = pstar_n(diag, ham(0));
  CHECK(type_conditional_mi(e) < 1e-12);
  CHECK(e.marginal_xy() == diag);
  JointTypeVec indep({2, 2}, {1, 1, 1, 1});
  CHECK(type_conditional_mi(pstar_n(indep, ham(1))) < 1e-12);
  JointTypeVec six({2, 2}, {2, 1, 1, 2});
  auto de = ham_q("1/6");
  CHECK(near(type_conditional_mi(pstar_n(six, de)), brute_pstar(six, de), 1e-12));
  // Level below anything attainable.
  DistortionSpec shifted(2, 2, std::vector<double>{0.5, 1, 1, 0.5}, 0.5);
  CHECK_NOTHROW(pstar_n(six, shifted));
  CHECK_THROWS_AS(pstar_n(six, shifted.with_level(parse_rational("0.4"))), EmptyFeasibleSet);
}

TEST_CASE("pstar_n matches brute force on all small joint types") {
  for (int n = 1; n <= 4; ++n)
    for (const auto& t : oracle::all_count_tables(n, 4)) {
      JointTypeVec jt({2, 2}, t);
      for (const char* lv : {"0", "1/4", "1/3", "1/2"}) {
        auto de = ham_q(lv);
        auto ext = pstar_n(jt, de);
        CHECK(ext.marginal_xy() == jt);
        CHECK(within(ext.counts(), 2, de, n, 2));
        CHECK(near(type_conditional_mi(ext), brute_pstar(jt, de), 1e-12));
      }
    }
}

TEST_CASE("pstar_n reports an empty feasible set distinctly") {
  DistortionSpec de(2, 2, std::vector<Rational>{Rational(1, 2), 1, 1, Rational(1, 2)}, Rational(1, 2));
  JointTypeVec jt({2, 2}, {1, 1, 1, 1});
  CHECK_NOTHROW(pstar_n(jt, de));
  // Same matrix with an entry pushed so that no extension reaches the level.
  DistortionSpec hard(2, 2, std::vector<Rational>{Rational(1, 2), 1, 1, Rational(3, 5)}, Rational(1, 2));
  CHECK_THROWS_AS(pstar_n(jt, hard), EmptyFeasibleSet);
}

TEST_CASE("qstar examples") {
  auto d = ham_q("1/3"), de = ham_q("1/6");
  TypeVec q({3, 3});
  auto best = qstar(q, d, de);
  double brute = -1;
  for (const auto& jt : joint_types_given_marginal_x(q, 2, d)) brute = std::max(brute, brute_pstar(jt, de));
  CHECK(near(best.value, brute, 1e-12));
  CHECK(std::fabs(best.value - closed_form_binary(0.5, 1.0 / 3, 1.0 / 6)) < 2.0 * std::log2(7.0) / 6);
  // D = 1: unconstrained over joint types with marginal q.
  auto loose = qstar(q, ham(1), de);
  double brute_all = -1;
  for (const auto& t : oracle::all_count_tables(6, 4))
    if (t[0] + t[1] == 3) brute_all = std::max(brute_all, brute_pstar(JointTypeVec({2, 2}, t), de));
  CHECK(near(loose.value, brute_all, 1e-12));
  // D = d_min: only the zero-distortion shell.
  auto tight = qstar(q, ham(0), de);
  CHECK(tight.joint == JointTypeVec({2, 2}, {3, 0, 0, 3}));
}

TEST_CASE("qstar_rate examples") {
  auto d = ham_q("1/3"), de = ham_q("1/6");
  TypeVec q({3, 3});
  auto wide = qstar_rate(q, 2.0, d, de);
  auto plain = qstar(q, d, de);
  CHECK(wide.crd_value >= conditional_rd(plain.joint.joint2(), de).value - 1e-9);
  // Independent integer types for (3,3) all sit at distortion 1/2.
  auto zero = qstar_rate(q, 0.0, ham_q("1/2"), de);
  CHECK(type_mutual_information(zero.joint) < 1e-12);
  CHECK(near(zero.value, rd_function(q.dist(), de).value, 1e-6));
  auto mid = qstar_rate(q, 0.5, d, de);
  double brute = -1;
  for (const auto& jt : joint_types_given_marginal_x(q, 2, d))
    if (type_mutual_information(jt) <= 0.5) brute = std::max(brute, conditional_rd(jt.joint2(), de).value);
  CHECK(near(mid.value, brute, 1e-12));
  CHECK_THROWS_AS(qstar_rate(TypeVec({3, 3}), 0.0, ham(0), de), EmptyFeasibleSet);
}

TEST_CASE("greedy_cover examples") {
  JointTypeVec diag({2, 2}, {2, 0, 0, 2});
  auto c = greedy_cover(diag);
  CHECK(c.codewords.size() == 6);

  JointTypeVec indep({2, 2}, {1, 1, 1, 1});
  auto g = greedy_cover(indep);
  std::vector<Seq> xs, ys;
  for_each_sequence(TypeVec({2, 2}), [&](const Seq& s) { xs.push_back(s); });
  ys = xs;
  std::vector<std::vector<bool>> m(xs.size(), std::vector<bool>(ys.size()));
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j) m[i][j] = joint_type_of(xs[i], ys[j], 2, 2) == indep;
  int opt = oracle::exhaustive_min_cover(m);
  CHECK(static_cast<double>(g.codewords.size()) <= (1 + std::log(6.0)) * opt);

  JointTypeVec unused({2, 3}, {1, 0, 1, 1, 0, 1});
  auto u = greedy_cover(unused);
  for (const auto& y : u.codewords)
    for (int s : y) CHECK(s != 1);
}

TEST_CASE("greedy_cover always covers") {
  for (int n = 1; n <= 6; ++n)
    for (const auto& q : enum_types(n, 2))
      for (const auto& jt : joint_types_given_marginal_x(q, 3, DistortionSpec::constant(2, 3, 0, 0))) {
        auto code = greedy_cover(jt);
        for_each_sequence(q, [&](const Seq& x) {
          auto it = code.cover_index.find(encode_seq(x, 2));
          REQUIRE(it != code.cover_index.end());
          REQUIRE(!it->second.empty());
          for (int i : it->second) CHECK(joint_type_of(x, code.codewords[i], 2, 3) == jt);
        });
        CHECK(code.codewords.size() <= static_cast<std::size_t>(type_class_size(q).get_ui()));
      }
}

TEST_CASE("keyed_codebooks") {
  JointTypeVec indep({2, 2}, {2, 2, 2, 2});
  auto kb = keyed_codebooks(indep, 0.25, 0.5, 1);
  CHECK(kb.books.size() == 4);
  CHECK(kb.codebook_size == 16);
  for (std::size_t b = 0; b < kb.books.size(); ++b) {
    CHECK_FALSE(kb.event_E_flags[b]);
    for (const auto& [x, idx] : kb.books[b].cover_index) {
      // Direct count over the drawn code.
      Seq xs = decode_seq(x, 8, 2);
      int count = 0;
      for (const auto& y : kb.books[b].codewords) count += joint_type_of(xs, y, 2, 2) == indep;
      CHECK(count == static_cast<int>(idx.size()));
      CHECK(count >= 1);
      CHECK(count <= 256);
    }
  }
  auto again = keyed_codebooks(indep, 0.25, 0.5, 1);
  CHECK(again.retries == kb.retries);
  for (std::size_t b = 0; b < kb.books.size(); ++b) CHECK(again.books[b].codewords == kb.books[b].codewords);

  CHECK(keyed_codebooks(indep, 0.0, 0.5, 3).books.size() == 1);
  CHECK_THROWS_AS(keyed_codebooks(indep, 0.3, 0.5, 1), ValidationError);

  // Identity joint type at small n: coverage by random draws fails and is reported.
  JointTypeVec diag({2, 2}, {3, 0, 0, 3});
  CHECK_THROWS_AS(keyed_codebooks(diag, 0.0, 0.5, 1), PersistentEventError);
  KeyedCodebookOptions keep;
  keep.allow_persistent = true;
  auto flagged = keyed_codebooks(diag, 0.0, 0.5, 1, keep);
  bool some_uncovered = false;
  for (const auto& [x, idx] : flagged.books[0].cover_index) some_uncovered |= idx.empty();
  CHECK(flagged.event_E_flags[0] == some_uncovered);
  CHECK(flagged.event_E_flags[0]);
}

TEST_CASE("conditional_ratio_bound_check") {
  // V equal to Y: the ratio is 1.
  JointTypeVec jt3({2, 2, 2}, {1, 0, 0, 1, 1, 0, 0, 1});
  auto r = conditional_ratio_bound_check(jt3, {0, 0, 1, 1}, {0, 1, 0, 1});
  CHECK(r.ratio == 1);
  CHECK(r.bound <= 1);
  CHECK(r.holds);
  CHECK_THROWS_AS(conditional_ratio_bound_check(jt3, {0, 0, 1, 1}, {0, 0, 1, 1}), ValidationError);
  // Exhaustive binary sweep at n <= 4 (criterion sweep runs to 6).
  for (int n = 1; n <= 4; ++n)
    for (const auto& t : oracle::all_count_tables(n, 8)) {
      JointTypeVec j({2, 2, 2}, t);
      auto xy = j.marginal_xy();
      Seq x, y;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int c = 0; c < xy(a, b); ++c) x.push_back(a), y.push_back(b);
      auto chk = conditional_ratio_bound_check(j, x, y);
      CHECK(chk.holds);
      if (type_conditional_mi(j) < 1e-12) CHECK(log2_rational(chk.ratio) >= -8 * std::log2(n + 1.0) - 1e-9);
    }
}

TEST_CASE("low_prob_types examples") {
  CHECK(low_prob_types(Dist::bernoulli(0.3), 5, kInf, 0).size() == 6);
  auto bal = low_prob_types(Dist::uniform(2), 6, 0, 0);
  REQUIRE(bal.size() == 1);
  CHECK(bal[0].counts() == std::vector<int>{3, 3});
  auto mid = low_prob_types(Dist::uniform(2), 8, 0.1, 0);
  std::set<int> ks;
  for (const auto& t : mid) ks.insert(t[1]);
  CHECK(ks == std::set<int>{3, 4, 5});
}

TEST_CASE("ball_membership examples") {
  CHECK(ball_membership({0, 1, 1, 0}, {0, 1, 1, 0}, ham(0)));
  CHECK_FALSE(ball_membership({0, 1, 1, 0}, {1, 0, 0, 1}, ham(0.9)));
  CHECK(ball_membership({0, 1, 1, 0}, {1, 1, 1, 0}, ham(0.25)));
  CHECK_FALSE(ball_membership({0, 1, 1, 0}, {1, 0, 1, 0}, ham(0.25)));
  CHECK_THROWS_AS(ball_membership({0, 1}, {0}, ham(0.25)), ValidationError);
  // Level 1/3 stored exactly: one mismatch in three is inside the ball.
  CHECK(ball_membership({0, 1, 1}, {1, 1, 1}, DistortionSpec::hamming(2, 1.0 / 3)));
}

TEST_CASE("sequence codes round-trip") {
  for (std::uint64_t c = 0; c < 81; ++c) CHECK(encode_seq(decode_seq(c, 4, 3), 3) == c);
  CHECK(encode_seq({1, 0, 0}, 2) == 4);
}
