#include "secexp/verify.hpp"

#include "secexp/cipher.hpp"
#include "secexp/error.hpp"
#include "secexp/exponent.hpp"
#include "secexp/oracle.hpp"
#include "secexp/rd.hpp"
#include "secexp/rng.hpp"
#include "secexp/types.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

namespace secexp::verify {

namespace {

// Plain binary entropy, kept separate from the library's entropy routines.
double hb(double q) {
  if (q <= 0 || q >= 1) return 0;
  return -q * std::log2(q) - (1 - q) * std::log2(1 - q);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Records one compared value; err is the violation size (<= 0 means fine).
void record(Check& c, bool ok, double err, const std::string& what) {
  ++c.cases;
  c.worst = std::max(c.worst, err);
  if (!ok) {
    ++c.violations;
    if (c.counterexample.empty()) c.counterexample = what;
  }
}

DistortionSpec ham(int k, const Rational& level) { return DistortionSpec::hamming(k, level); }

// Random matrix on the quarter grid with a zero in every row, so the
// smallest level is 0. The level sits a fraction u of the way from 0 to the
// zero-rate level min_v E_p d(X, v), which keeps the instance non-trivial.
DistortionSpec random_spec(Rng& rng, const Dist& p, std::size_t cols, double lo, double hi) {
  const std::size_t rows = p.size();
  std::vector<double> m(rows * cols);
  const std::size_t shift = rng.below(cols);
  for (std::size_t x = 0; x < rows; ++x) {
    const std::size_t zero = (shift + x) % cols;  // distinct while rows <= cols
    for (std::size_t v = 0; v < cols; ++v)
      m[x * cols + v] = v == zero ? 0.0 : (1 + static_cast<double>(rng.below(4))) / 4;
  }
  double zero_rate = kInf;
  for (std::size_t v = 0; v < cols; ++v) {
    double e = 0;
    for (std::size_t x = 0; x < rows; ++x) e += p[x] * m[x * cols + v];
    zero_rate = std::min(zero_rate, e);
  }
  const double u = lo + (hi - lo) * rng.uniform();
  return DistortionSpec(rows, cols, m, u * zero_rate);
}

std::string spec_str(const DistortionSpec& s) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < s.matrix().size(); ++i) os << (i ? "," : "") << s.matrix()[i];
  os << "] level " << s.level();
  return os.str();
}

std::string dist_str(const Dist& p) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
  os << ")";
  return os.str();
}

// --- criteria ---------------------------------------------------------------

Check c_closed_form(std::uint64_t) {
  Check c;
  c.property = "r_blur matches the binary Hamming closed form within 1e-3";
  for (int k = 1; k <= 10; ++k) {
    const double q = 0.05 * k;
    for (double D : {0.15, 0.25, 0.35}) {
      std::vector<double> des{0.05, 0.1, D};
      std::sort(des.begin(), des.end());
      des.erase(std::unique(des.begin(), des.end()), des.end());
      for (double De : des) {
        if (De > D) continue;
        const double got = r_blur(Dist::bernoulli(q), DistortionSpec::hamming(2, D),
                                  DistortionSpec::hamming(2, De)).value;
        const double want = oracle::binary_blur_hamming(q, D, De);
        const double err = std::fabs(got - want);
        record(c, err <= 1e-3, err,
               "q=" + fmt(q) + " D=" + fmt(D) + " De=" + fmt(De) + ": " + fmt(got) + " vs " + fmt(want));
        if (q == 0.5 && D == 0.25 && De == 0.1) c.metrics["value_at_0.5_0.25_0.1"] = got;
      }
    }
  }
  c.detail = std::to_string(c.cases) + " grid points, max |error| " + fmt(c.worst);
  return c;
}

Check c_keyed_uniform(std::uint64_t) {
  Check c;
  c.property = "keyed exponent of Ber(1/2) equals min(r + h(D) - h(De), 1 - h(De)) within 2e-3";
  const double blur = hb(0.25) - hb(0.1), e0 = 1 - hb(0.1);
  for (double r : {0.05, 0.1, 0.15, 0.2, 0.5}) {
    const double got = exponent_key(Dist::bernoulli(0.5), DistortionSpec::hamming(2, 0.25),
                                    DistortionSpec::hamming(2, 0.1), 1.0, r, kInf).value;
    const double want = r < 0.2 ? r + blur : e0;
    const double err = std::fabs(got - want);
    record(c, err <= 2e-3, err, "r=" + fmt(r) + ": " + fmt(got) + " vs " + fmt(want));
    c.metrics["r=" + fmt(r)] = got;
  }
  c.detail = "5 key rates, max |error| " + fmt(c.worst);
  return c;
}

Check c_perfect_reconstruction(std::uint64_t) {
  Check c;
  c.property = "r_blur_rate at R=1, De=0 equals H(Q) - R(Q,D) within 2e-3";
  for (int k = 1; k <= 5; ++k) {
    const double q = 0.1 * k;
    for (double D : {0.1, 0.25}) {
      const double got = r_blur_rate(Dist::bernoulli(q), 1.0, DistortionSpec::hamming(2, D),
                                     DistortionSpec::hamming(2, 0.0)).value;
      const double want = hb(q) - oracle::binary_rd_hamming(q, D);
      const double err = std::fabs(got - want);
      record(c, err <= 2e-3, err, "q=" + fmt(q) + " D=" + fmt(D) + ": " + fmt(got) + " vs " + fmt(want));
    }
  }
  c.detail = std::to_string(c.cases) + " points, max |error| " + fmt(c.worst);
  return c;
}

Check c_crd_oracle(std::uint64_t seed, int count) {
  Check c;
  c.property = "conditional_rd agrees with the brute-force grid minimizer within 5e-3";
  Rng rng(derive_seed(seed, 0xC4D));
  for (int i = 0; i < count; ++i) {
    auto inst = oracle::random_binary_crd_instance(rng);
    const double fast = conditional_rd(inst.joint, inst.spec_e).value;
    const double slow = oracle::brute_conditional_rd_binary(inst.joint, inst.spec_e);
    const double err = std::fabs(fast - slow);
    record(c, err <= 5e-3, err,
           "instance " + std::to_string(i) + ": " + fmt(fast) + " vs " + fmt(slow) + " " + spec_str(inst.spec_e));
  }
  c.detail = std::to_string(c.cases) + " instances, max |difference| " + fmt(c.worst);
  return c;
}

Check c_sandwich(std::uint64_t seed, int count) {
  Check c;
  c.property = "max(0, Re - R) - 1e-3 <= r_blur <= Re + 1e-3 and r_blur_rate <= r_blur + 1e-3";
  Rng rng(derive_seed(seed, 0x5A7D));
  SearchOptions opt;
  opt.random_starts = 6;
  opt.seed = seed;
  for (int i = 0; i < count; ++i) {
    const std::size_t nx = 2 + rng.below(3), ny = 2 + rng.below(3), nv = 2 + rng.below(3);
    Dist p = Dist::normalize(rng.dirichlet(nx));
    DistortionSpec d = random_spec(rng, p, ny, 0.1, 0.8);
    DistortionSpec e = random_spec(rng, p, nv, 0.1, 0.7);
    const double r = rd_function(p, d).value, re = rd_function(p, e).value;
    const double R = r + rng.uniform() * (std::log2(static_cast<double>(ny)) + 1 - r);
    const auto free = r_blur(p, d, e, opt);
    const auto capped = r_blur_rate(p, R, d, e, opt);
    const double lo = std::max(0.0, re - r) - free.value;
    const double hi = free.value - re;
    const double rate = capped.value - free.value;
    const double err = std::max({lo, hi, rate});
    record(c, err <= 1e-3, err,
           "instance " + std::to_string(i) + " p=" + dist_str(p) + " d=" + spec_str(d) + " de=" +
               spec_str(e) + ": r_blur " + fmt(free.value) + " Re " + fmt(re) + " R(D) " + fmt(r) +
               " r_blur_rate(" + fmt(R) + ") " + fmt(capped.value));
  }
  c.detail = std::to_string(c.cases) + " instances, worst excess " + fmt(c.worst);
  return c;
}

Check c_ratio_exhaustive(std::uint64_t) {
  Check c;
  c.property = "|T_V|XY| / |T_V|Y| >= (n+1)^-8 2^(-n I(X;V|Y)) for every binary joint type, n <= 6";
  double min_margin = kInf;
  for (int n = 1; n <= 6; ++n)
    for (const auto& t : oracle::all_count_tables(n, 8)) {
      JointTypeVec jt({2, 2, 2}, t);
      Seq x, y;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int k = 0; k < jt(a, b, 0) + jt(a, b, 1); ++k) {
            x.push_back(a);
            y.push_back(b);
          }
      RatioCheck rc = conditional_ratio_bound_check(jt, x, y);
      const double margin = log2_rational(rc.ratio) - std::log2(rc.bound);
      min_margin = std::min(min_margin, margin);
      std::ostringstream os;
      os << "n=" << n << " counts";
      for (int v : t) os << " " << v;
      record(c, rc.holds, -margin, os.str());
    }
  c.worst = min_margin;
  c.detail = std::to_string(c.cases) + " joint types, smallest log2 margin " + fmt(min_margin);
  return c;
}

Check c_covering(std::uint64_t) {
  Check c;
  c.property = "greedy_cover covers every sequence of the type with the exact joint type";
  long codes = 0;
  for (int n = 1; n <= 8; ++n)
    for (const auto& q : enum_types(n, 2))
      for (const Rational& D : {Rational(0), Rational(1, 4), Rational(1, 2)})
        for (const auto& jt : joint_types_given_marginal_x(q, 2, ham(2, D))) {
          CoverCode code = greedy_cover(jt);
          ++codes;
          for_each_sequence(q, [&](const Seq& x) {
            bool hit = false;
            for (const auto& y : code.codewords)
              if (joint_type_of(x, y, 2, 2) == jt) {
                hit = true;
                break;
              }
            std::ostringstream os;
            os << "n=" << n << " D=" << to_string(D) << " x=";
            for (int a : x) os << a;
            record(c, hit, hit ? 0 : 1, os.str());
          });
        }
  c.metrics["codes"] = static_cast<double>(codes);
  c.detail = std::to_string(codes) + " codes, " + std::to_string(c.cases) + " sequence checks, " +
             std::to_string(c.violations) + " misses";
  return c;
}

Check c_constant_encoder(std::uint64_t) {
  Check c;
  c.property = "MAP success of the constant encoder equals Pr(Bin(n,1/2) <= floor(n De)) exactly";
  for (const Rational& De : {Rational(1, 10), Rational(1, 4)})
    for (int n = 1; n <= 14; ++n) {
      BlurSystem s = make_constant_blur_system(Dist::bernoulli(0.5), n, DistortionSpec::constant(2, 2, 0.0, 0.0),
                                               ham(2, De));
      AdversaryReport r = map_adversary(s);
      Rational nd = De * n;
      BigInt fl;
      mpz_fdiv_q(fl.get_mpz_t(), nd.get_num_mpz_t(), nd.get_den_mpz_t());
      const Rational want = oracle::binomial_cdf(n, static_cast<int>(fl.get_si()), Rational(1, 2));
      const bool ok = r.exact && *r.exact == want;
      record(c, ok, ok ? 0 : std::fabs(r.success - to_double(want)),
             "n=" + std::to_string(n) + " De=" + to_string(De) + ": " + (r.exact ? to_string(*r.exact) : "none") +
                 " vs " + to_string(want));
    }
  c.detail = std::to_string(c.cases) + " (n, De) pairs compared as exact rationals";
  return c;
}

Check c_convergence(std::uint64_t) {
  Check c;
  c.property = "blind exponents at n=4,8,12,14 are <= 1-h(1/4), increasing, gap(14) <= 2log2(15)/14, gaps strictly decreasing";
  const double theory = 1 - hb(0.25);
  Trend t = exponent_trend([](int n) { return blind_adversary(Dist::bernoulli(0.5), n, ham(2, Rational(1, 4))); },
                           {4, 8, 12, 14}, theory);
  std::ostringstream rows;
  for (const auto& r : t.rows) {
    rows << " n=" << r.n << ":" << fmt(r.exponent);
    c.metrics["exponent_n" + std::to_string(r.n)] = r.exponent;
  }
  const double gap14 = t.rows.back().gap, bound = 2 * std::log2(15.0) / 14;
  record(c, t.below_theory, t.below_theory ? 0 : 1, "exponents above " + fmt(theory) + ":" + rows.str());
  record(c, t.exponent_increasing, t.exponent_increasing ? 0 : 1, "exponents not increasing:" + rows.str());
  record(c, gap14 <= bound, gap14 - bound, "gap at n=14 " + fmt(gap14) + " > " + fmt(bound));
  record(c, t.gap_decreasing, t.gap_decreasing ? 0 : 1, "gaps not strictly decreasing:" + rows.str());
  c.detail = "theory " + fmt(theory) + ";" + rows.str();
  return c;
}

Check c_two_stage_bound(std::uint64_t) {
  Check c;
  c.property = "two-stage per-pair success >= (n+1)^-8 2^(-n I*) at n=6, D=1/3, De=1/6";
  BlurSystem s = build_blur_system(Dist::bernoulli(0.5), 6, ham(2, Rational(1, 3)), ham(2, Rational(1, 6)));
  TwoStageOptions opt;
  opt.bound_exponent = 8;
  AdversaryReport r = two_stage_adversary(s, opt);
  const long pairs = static_cast<long>(r.diagnostics.at("bound_pairs"));
  const long bad = static_cast<long>(r.diagnostics.at("bound_violations"));
  c.cases = pairs;
  c.violations = bad;
  c.worst = r.diagnostics.at("bound_min_margin_log2");
  if (bad) c.counterexample = std::to_string(bad) + " pairs below the bound, smallest log2 margin " + fmt(c.worst);
  c.metrics["success"] = r.success;
  c.detail = std::to_string(pairs) + " pairs, smallest log2 margin " + fmt(c.worst) + ", success " + fmt(r.success);
  return c;
}

Check c_keyed_books(std::uint64_t seed) {
  Check c;
  c.property = "4 keyed books at n=8, eps=0.5: no event E, 1 <= N_x <= 2^8, per-message bound holds";
  const JointTypeVec jt({2, 2}, {2, 2, 2, 2});
  KeyedCodebooks kb = keyed_codebooks(jt, 0.25, 0.5, seed);
  for (std::size_t b = 0; b < kb.books.size(); ++b)
    record(c, !kb.event_E_flags[b], kb.event_E_flags[b] ? 1 : 0, "book " + std::to_string(b) + " shows event E");
  for (std::size_t b = 0; b < kb.books.size(); ++b)
    for_each_sequence(TypeVec({4, 4}), [&](const Seq& x) {
      auto it = kb.books[b].cover_index.find(encode_seq(x, 2));
      const long N = it == kb.books[b].cover_index.end() ? 0 : static_cast<long>(it->second.size());
      std::ostringstream os;
      os << "book " << b << " x=";
      for (int a : x) os << a;
      os << " N_x=" << N;
      record(c, N >= 1 && N <= 256, N >= 1 && N <= 256 ? 0 : 1, os.str());
    });
  std::map<TypeVec, KeyedCodebooks> books{{TypeVec({4, 4}), kb}};
  KeyedSystem s = assemble_keyed_system(Dist::bernoulli(0.5), 8, ham(2, Rational(1, 2)), ham(2, Rational(1, 8)),
                                        1.0, 0.25, kInf, 0.0, books);
  AdversaryReport r = keyed_map_adversary(s);
  double max_ratio = 0;
  for (const auto& mb : r.message_bounds) {
    const double ratio = to_double(mb.conditional_success) / mb.bound;
    max_ratio = std::max(max_ratio, ratio);
    record(c, mb.holds, mb.holds ? 0 : ratio,
           "message (" + std::to_string(mb.type_id) + "," + std::to_string(mb.index) + "): " +
               to_string(mb.conditional_success) + " > " + fmt(mb.bound));
  }
  c.metrics["codebook_size"] = kb.codebook_size;
  c.metrics["messages_checked"] = static_cast<double>(r.message_bounds.size());
  c.metrics["max_success_over_bound"] = max_ratio;
  c.metrics["keyed_map_success"] = r.success;
  c.detail = "N=" + std::to_string(kb.codebook_size) + ", " + std::to_string(r.message_bounds.size()) +
             " messages, max success/bound " + fmt(max_ratio);
  return c;
}

Check c_recovery(std::uint64_t seed, int count) {
  Check c;
  c.property = "exponent_key at r=0, alpha=inf, R=log2|Y|+1 equals exponent_nokey within 2e-3";
  Rng rng(derive_seed(seed, 0x7E1));
  for (int i = 0; i < count; ++i) {
    Dist p = Dist::bernoulli(0.1 + 0.8 * rng.uniform());
    DistortionSpec d = random_spec(rng, p, 2, 0.2, 0.8);
    DistortionSpec e = random_spec(rng, p, 2, 0.2, 0.8);
    SearchOptions opt;
    opt.random_starts = 8;
    opt.seed = derive_seed(seed, 0x7E2, i);
    const double nokey = exponent_nokey(p, d, e, opt).value;
    const double key = exponent_key(p, d, e, 2.0, 0.0, kInf, opt).value;
    const double err = std::fabs(key - nokey);
    record(c, err <= 2e-3, err,
           "instance " + std::to_string(i) + " p=" + dist_str(p) + " d=" + spec_str(d) + " de=" + spec_str(e) +
               ": key " + fmt(key) + " vs nokey " + fmt(nokey));
  }
  c.detail = std::to_string(c.cases) + " instances, max |difference| " + fmt(c.worst);
  return c;
}

// --- extra suites -----------------------------------------------------------

Check c_encoder_validity(std::uint64_t) {
  Check c;
  c.property = "every blur encoder meets d(x^n, f(x^n)) <= D on every sequence; genie MAP >= MAP";
  for (int n = 1; n <= 8; ++n)
    for (const Rational& D : {Rational(0), Rational(1, 4), Rational(1, 3), Rational(1, 2)}) {
      BlurSystem s = build_blur_system(Dist::bernoulli(0.3), n, ham(2, D), ham(2, Rational(1, 8)));
      const long bad = encoder_violations(s);
      record(c, bad == 0, static_cast<double>(bad), "n=" + std::to_string(n) + " D=" + to_string(D));
      if (n <= 6) {
        auto m = map_adversary(s), g = genie_map_adversary(s);
        record(c, *g.exact >= *m.exact, to_double(*m.exact - *g.exact),
               "genie below MAP at n=" + std::to_string(n) + " D=" + to_string(D));
        auto t = two_stage_adversary(s);
        record(c, *t.exact <= *m.exact, to_double(*t.exact - *m.exact),
               "two-stage above MAP at n=" + std::to_string(n) + " D=" + to_string(D));
      }
    }
  c.detail = std::to_string(c.cases) + " checks";
  return c;
}

Check c_crd_properties(std::uint64_t seed) {
  Check c;
  c.property = "conditional_rd is within [0, Re], non-increasing and midpoint-convex in De";
  Rng rng(derive_seed(seed, 0xC9));
  for (int i = 0; i < 40; ++i) {
    const std::size_t nx = 2 + rng.below(2), ny = 2 + rng.below(2), nv = 2 + rng.below(2);
    Joint2 j(nx, ny, Dist::normalize(rng.dirichlet(nx * ny)).probs());
    DistortionSpec e = random_spec(rng, j.marginal_x(), nv, 0.0, 0.0);
    const double lo = e.d_min(), hi = e.d_max();
    double a = lo + (hi - lo) * rng.uniform(), b = lo + (hi - lo) * rng.uniform();
    if (a > b) std::swap(a, b);
    const double fa = conditional_rd(j, e.with_level(a)).value;
    const double fb = conditional_rd(j, e.with_level(b)).value;
    const double fm = conditional_rd(j, e.with_level((a + b) / 2)).value;
    std::vector<double> px(nx, 0);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y) px[x] += j(x, y);
    const double re = rd_function(Dist::normalize(px), e.with_level(a)).value;
    const double err = std::max({-fa, fa - re - 1e-6, fb - fa - 1e-8, fm - (fa + fb) / 2 - 1e-6});
    record(c, err <= 0, err, "instance " + std::to_string(i) + " levels " + fmt(a) + "," + fmt(b));
  }
  c.detail = std::to_string(c.cases) + " instances";
  return c;
}

using Runner = std::function<std::vector<Check>(std::uint64_t)>;

struct Entry {
  SuiteInfo info;
  Runner run;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> r = {
      {{"lemma3", "binary Hamming closed form of the worst-case side-information value"},
       [](std::uint64_t s) { return std::vector<Check>{c_closed_form(s)}; }},
      {{"theorem2", "keyed exponent of a uniform bit against its closed form"},
       [](std::uint64_t s) { return std::vector<Check>{c_keyed_uniform(s)}; }},
      {{"perfect", "perfect-reconstruction identity for the rate-capped value"},
       [](std::uint64_t s) { return std::vector<Check>{c_perfect_reconstruction(s)}; }},
      {{"crd_oracle", "conditional rate-distortion against the brute-force grid"},
       [](std::uint64_t s) { return std::vector<Check>{c_crd_oracle(s, 50)}; }},
      {{"sandwich", "upper and lower bounds on the worst-case side-information value"},
       [](std::uint64_t s) { return std::vector<Check>{c_sandwich(s, 100)}; }},
      {{"lemma2", "conditional type-class ratio bound, exhaustive for n <= 6"},
       [](std::uint64_t s) { return std::vector<Check>{c_ratio_exhaustive(s)}; }},
      {{"covering", "greedy covering codes, exhaustive for binary n <= 8"},
       [](std::uint64_t s) { return std::vector<Check>{c_covering(s)}; }},
      {{"blind", "constant-encoder MAP success against the binomial tail"},
       [](std::uint64_t s) { return std::vector<Check>{c_constant_encoder(s)}; }},
      {{"convergence", "finite-n blind exponents against the asymptotic value"},
       [](std::uint64_t s) { return std::vector<Check>{c_convergence(s)}; }},
      {{"lemma4", "two-stage adversary per-pair bound"},
       [](std::uint64_t s) { return std::vector<Check>{c_two_stage_bound(s)}; }},
      {{"lemma5", "keyed codebook events and the per-message guessing bound"},
       [](std::uint64_t s) { return std::vector<Check>{c_keyed_books(s)}; }},
      {{"recovery", "zero-key keyed exponent against the no-key exponent"},
       [](std::uint64_t s) { return std::vector<Check>{c_recovery(s, 20)}; }},
      {{"encoder", "encoder validity and adversary ordering on small blur systems"},
       [](std::uint64_t s) { return std::vector<Check>{c_encoder_validity(s)}; }},
      {{"crd_properties", "range, monotonicity and convexity of conditional rate-distortion"},
       [](std::uint64_t s) { return std::vector<Check>{c_crd_properties(s)}; }},
  };
  return r;
}

Check timed(const std::function<Check()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Check c = fn();
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

}  // namespace

std::vector<SuiteInfo> list_suites() {
  std::vector<SuiteInfo> out;
  for (const auto& e : registry()) out.push_back(e.info);
  return out;
}

std::vector<Check> run_suite(const std::string& name, std::uint64_t seed) {
  for (const auto& e : registry())
    if (e.info.name == name) {
      const auto t0 = std::chrono::steady_clock::now();
      auto checks = e.run(seed);
      const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (checks.size() == 1) checks[0].seconds = sec;
      return checks;
    }
  std::string known;
  for (const auto& e : registry()) known += (known.empty() ? "" : ", ") + e.info.name;
  throw ValidationError("unknown suite '" + name + "' (known: " + known + ")");
}

Check criterion(int k, std::uint64_t seed) {
  switch (k) {
    case 1: return timed([&] { return c_closed_form(seed); });
    case 2: return timed([&] { return c_keyed_uniform(seed); });
    case 3: return timed([&] { return c_perfect_reconstruction(seed); });
    case 4: return timed([&] { return c_crd_oracle(seed, 50); });
    case 5: return timed([&] { return c_sandwich(seed, 100); });
    case 6: return timed([&] { return c_ratio_exhaustive(seed); });
    case 7: return timed([&] { return c_covering(seed); });
    case 8: return timed([&] { return c_constant_encoder(seed); });
    case 9: return timed([&] { return c_convergence(seed); });
    case 10: return timed([&] { return c_two_stage_bound(seed); });
    case 11: return timed([&] { return c_keyed_books(seed); });
    case 12: return timed([&] { return c_recovery(seed, 20); });
  }
  throw ValidationError("criterion must be 1.." + std::to_string(kCriteria));
}

}  // namespace secexp::verify
