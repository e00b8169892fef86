#include "secexp/cipher.hpp"

#include "secexp/error.hpp"
#include "secexp/rd.hpp"
#include "secexp/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace secexp {

namespace {

double ipow(double b, int e) { return std::pow(b, e); }

Rational qpow(const Rational& q, int e) {
  BigInt num, den;
  mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), static_cast<unsigned long>(e));
  mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), static_cast<unsigned long>(e));
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational prob_of_counts(const std::vector<Rational>& p, const std::vector<int>& counts) {
  Rational r = 1;
  for (std::size_t a = 0; a < counts.size(); ++a)
    if (counts[a] > 0) r *= qpow(p[a], counts[a]);
  return r;
}

std::vector<int> counts_of_code(std::uint64_t code, int n, std::size_t k) {
  std::vector<int> c(k, 0);
  for (int i = 0; i < n; ++i) {
    ++c[code % k];
    code /= k;
  }
  return c;
}

std::uint64_t space_size(std::size_t k, int n, double limit, const char* what) {
  double sz = ipow(static_cast<double>(k), n);
  if (sz > limit) {
    std::ostringstream os;
    os << what << ": " << k << "^" << n << " = " << sz << " sequences exceeds the limit " << limit;
    throw GuardError(os.str());
  }
  return static_cast<std::uint64_t>(std::llround(sz));
}

void finish(AdversaryReport& r) {
  r.empirical_exponent = r.success > 0 ? -std::log2(r.success) / r.n : kInf;
}

void set_exact(AdversaryReport& r, const Rational& v) {
  r.exact = v;
  r.success = to_double(v);
  r.empirical_exponent = v > 0 ? -log2_rational(v) / r.n : kInf;
}

// Exact ball test d_e(x^n, v^n) <= D_e on sequence codes.
class Ball {
 public:
  Ball(const DistortionSpec& de, int n, std::size_t nx)
      : sc_(scaled_costs(de, n)), n_(n), nx_(nx), nv_(de.cols()) {
    fast_ = de.is_hamming() && nx == 2 && nv_ == 2;
    if (fast_) t_ = static_cast<int>(sc_.level / sc_.at(0, 1));
  }
  bool fast() const { return fast_; }
  bool operator()(std::uint64_t x, std::uint64_t v) const {
    if (fast_) return std::popcount(x ^ v) <= t_;
    long long s = 0;
    for (int i = 0; i < n_; ++i) {
      s += sc_.at(x % nx_, v % nv_);
      if (s > sc_.level) return false;
      x /= nx_;
      v /= nv_;
    }
    return true;
  }

 private:
  ScaledCosts sc_;
  int n_;
  std::size_t nx_, nv_;
  bool fast_ = false;
  int t_ = 0;
};

long long pair_cost(const ScaledCosts& sc, std::uint64_t x, std::uint64_t y, int n, std::size_t nx,
                    std::size_t ny) {
  long long s = 0;
  for (int i = 0; i < n; ++i) {
    s += sc.at(x % nx, y % ny);
    x /= nx;
    y /= ny;
  }
  return s;
}

Seq sorted_multiset(const std::vector<int>& counts) {
  Seq s;
  for (std::size_t a = 0; a < counts.size(); ++a) s.insert(s.end(), counts[a], static_cast<int>(a));
  return s;
}

// Two-stage guessing given an observed reproduction y: a joint type drawn
// uniformly from those with Y-marginal type(y) and E[d] <= D, then v drawn
// uniformly from the V-shell of its pstar extension around y.
class TwoStage {
 public:
  TwoStage(const DistortionSpec& d, const DistortionSpec& de, int n, std::size_t nx, std::size_t ny)
      : d_(d), de_(de), n_(n), nx_(nx), ny_(ny), nv_(de.cols()), ball_(de, n, nx) {}

  struct Shell {
    std::vector<std::vector<int>> counts;  // per y symbol, counts over V
    BigInt size;
    std::vector<std::uint64_t> vs;  // filled on demand
  };
  struct Entry {
    std::vector<Shell> shells;  // one per candidate joint type
  };

  Entry& entry(std::uint64_t ycode) {
    auto it = cache_.find(ycode);
    if (it != cache_.end()) return it->second;
    Entry e;
    Seq y = decode_seq(ycode, n_, ny_);
    for (const auto& jt : joint_types_given_marginal_y(type_of(y, ny_), nx_, d_)) {
      const JointTypeVec& ext = extension(jt);
      Shell sh;
      sh.counts.assign(ny_, std::vector<int>(nv_, 0));
      for (std::size_t a = 0; a < nx_; ++a)
        for (std::size_t b = 0; b < ny_; ++b)
          for (std::size_t v = 0; v < nv_; ++v) sh.counts[b][v] += ext(a, b, v);
      sh.size = 1;
      for (const auto& c : sh.counts) sh.size *= multinomial(c);
      e.shells.push_back(std::move(sh));
    }
    return cache_.emplace(ycode, std::move(e)).first->second;
  }

  double work(std::uint64_t ycode, std::size_t xs) {
    double w = 0;
    for (const auto& sh : entry(ycode).shells) w += to_double(Rational(sh.size)) * (1.0 + xs);
    return w;
  }

  // Exact Pr(success | X^n = x, observed y).
  Rational pair(std::uint64_t xcode, std::uint64_t ycode) {
    auto key = std::make_pair(xcode, ycode);
    auto it = pairs_.find(key);
    if (it != pairs_.end()) return it->second;
    Entry& e = entry(ycode);
    Rational total = 0;
    if (!e.shells.empty()) {
      Seq y = decode_seq(ycode, n_, ny_);
      for (auto& sh : e.shells) {
        if (sh.vs.empty())
          for_each_conditional(y, sh.counts, nv_, [&](const Seq& v) { sh.vs.push_back(encode_seq(v, nv_)); });
        long hit = 0;
        for (auto v : sh.vs) hit += ball_(xcode, v);
        total += Rational(hit) / Rational(sh.size);
      }
      total /= static_cast<long>(e.shells.size());
    }
    total.canonicalize();
    pairs_.emplace(key, total);
    return total;
  }

  // One sampled attempt.
  bool sample(std::uint64_t xcode, std::uint64_t ycode, Rng& rng) {
    Entry& e = entry(ycode);
    if (e.shells.empty()) return false;
    const Shell& sh = e.shells[rng.below(e.shells.size())];
    Seq y = decode_seq(ycode, n_, ny_);
    std::vector<Seq> groups(ny_);
    for (std::size_t b = 0; b < ny_; ++b) groups[b] = sorted_multiset(sh.counts[b]);
    for (auto& g : groups)
      for (std::size_t k = g.size(); k > 1; --k) std::swap(g[k - 1], g[rng.below(k)]);
    std::vector<std::size_t> used(ny_, 0);
    Seq v(n_);
    for (int i = 0; i < n_; ++i) v[i] = groups[y[i]][used[y[i]]++];
    return ball_(xcode, encode_seq(v, nv_));
  }

  const JointTypeVec& extension(const JointTypeVec& jt) {
    auto it = ext_.find(jt);
    if (it == ext_.end()) it = ext_.emplace(jt, pstar_n(jt, de_)).first;
    return it->second;
  }

 private:
  const DistortionSpec& d_;
  const DistortionSpec& de_;
  int n_;
  std::size_t nx_, ny_, nv_;
  Ball ball_;
  std::map<std::uint64_t, Entry> cache_;
  std::map<JointTypeVec, JointTypeVec> ext_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, Rational> pairs_;
};

int index_bits_for(long v) {
  return v <= 1 ? 0 : static_cast<int>(std::ceil(std::log2(static_cast<double>(v)) - 1e-12));
}

void check_system_shapes(const Dist& p, const DistortionSpec& d, const DistortionSpec& de, int n) {
  require(n >= 1, "system: n must be >= 1");
  require(d.rows() == p.size(), "system: legitimate distortion rows must match the source alphabet");
  require(de.rows() == p.size(), "system: eavesdropper distortion rows must match the source alphabet");
}

}  // namespace

std::vector<Rational> exact_source(const Dist& p) {
  std::vector<Rational> q;
  Rational s = 0;
  for (double v : p.probs()) {
    q.push_back(rationalize(v));
    s += q.back();
  }
  if (s != 1)
    for (auto& v : q) {
      v /= s;
      v.canonicalize();
    }
  return q;
}

// ---------------------------------------------------------------------------
// Blur systems

BlurSystem build_blur_system(const Dist& p, int n, const DistortionSpec& spec_d,
                             const DistortionSpec& spec_e) {
  check_system_shapes(p, spec_d, spec_e, n);
  BlurSystem s;
  s.source = p;
  s.source_exact = exact_source(p);
  s.n = n;
  s.spec_d = spec_d;
  s.spec_e = spec_e;
  s.nx = p.size();
  s.ny = spec_d.cols();
  s.kind = "blur";
  s.encoder.assign(space_size(s.nx, n, kSequenceGuard, "build_blur_system"), 0);
  for (const auto& q : enum_types(n, s.nx)) {
    TypeCode tc;
    tc.choice = qstar(q, spec_d, spec_e);
    tc.code = greedy_cover(tc.choice.joint);
    for_each_sequence(q, [&](const Seq& x) {
      std::uint64_t xc = encode_seq(x, s.nx);
      const auto& idx = tc.code.cover_index.at(xc);
      s.encoder[xc] = encode_seq(tc.code.codewords[idx.front()], s.ny);
    });
    s.per_type_code.emplace(q, std::move(tc));
  }
  if (encoder_violations(s) != 0) throw std::logic_error("build_blur_system: encoder breaks the distortion level");
  return s;
}

BlurSystem make_constant_blur_system(const Dist& p, int n, const DistortionSpec& spec_d,
                                     const DistortionSpec& spec_e, int y_symbol) {
  check_system_shapes(p, spec_d, spec_e, n);
  require(y_symbol >= 0 && static_cast<std::size_t>(y_symbol) < spec_d.cols(),
          "make_constant_blur_system: output symbol out of range");
  BlurSystem s;
  s.source = p;
  s.source_exact = exact_source(p);
  s.n = n;
  s.spec_d = spec_d;
  s.spec_e = spec_e;
  s.nx = p.size();
  s.ny = spec_d.cols();
  s.kind = "constant";
  const std::uint64_t y = encode_seq(Seq(n, y_symbol), s.ny);
  s.encoder.assign(space_size(s.nx, n, kSequenceGuard, "make_constant_blur_system"), y);
  if (long bad = encoder_violations(s)) {
    std::ostringstream os;
    os << "make_constant_blur_system: " << bad << " source sequences exceed the distortion level";
    throw ValidationError(os.str());
  }
  return s;
}

long encoder_violations(const BlurSystem& s) {
  const ScaledCosts sc = scaled_costs(s.spec_d, s.n);
  long bad = 0;
  for (std::uint64_t x = 0; x < s.encoder.size(); ++x)
    bad += pair_cost(sc, x, s.encoder[x], s.n, s.nx, s.ny) > sc.level;
  return bad;
}

// ---------------------------------------------------------------------------
// Exact MAP core

MapOutcome exact_map(const ObservationModel& model, const DistortionSpec& spec_e) {
  require(spec_e.rows() == model.nx, "exact_map: eavesdropper matrix rows must match |X|");
  const int n = model.n;
  const std::size_t nv = spec_e.cols();
  Ball ball(spec_e, n, model.nx);
  const double vcount_d = ipow(static_cast<double>(nv), n);
  if (!ball.fast() && vcount_d > kVGuard) {
    std::ostringstream os;
    os << "exact_map: |V|^n = " << vcount_d << " exceeds " << kVGuard;
    throw GuardError(os.str());
  }
  double pairs = 0;
  for (const auto& m : model.messages) pairs += static_cast<double>(m.size());
  if (pairs * vcount_d > kPairGuard) {
    std::ostringstream os;
    os << "exact_map: " << pairs * vcount_d << " ball tests exceed " << kPairGuard;
    throw GuardError(os.str());
  }
  const std::uint64_t vcount = static_cast<std::uint64_t>(std::llround(vcount_d));

  MapOutcome out;
  out.total = 0;
  std::vector<double> score(vcount);
  for (const auto& msg : model.messages) {
    // Weight classes: exact values once, integer hit counts per v.
    std::map<Rational, int> cls;
    std::vector<int> cid(msg.size());
    std::vector<Rational> wq;
    for (std::size_t i = 0; i < msg.size(); ++i) {
      auto [it, fresh] = cls.emplace(msg[i].second, static_cast<int>(wq.size()));
      if (fresh) wq.push_back(msg[i].second);
      cid[i] = it->second;
    }
    std::vector<double> wd(wq.size());
    for (std::size_t c = 0; c < wq.size(); ++c) wd[c] = to_double(wq[c]);
    std::vector<int> cnt(wq.size());
    auto counts_at = [&](std::uint64_t v) {
      std::fill(cnt.begin(), cnt.end(), 0);
      for (std::size_t i = 0; i < msg.size(); ++i)
        if (ball(msg[i].first, v)) ++cnt[cid[i]];
    };
    double best = 0;
    for (std::uint64_t v = 0; v < vcount; ++v) {
      counts_at(v);
      double s = 0;
      for (std::size_t c = 0; c < cnt.size(); ++c) s += cnt[c] * wd[c];
      score[v] = s;
      best = std::max(best, s);
    }
    Rational exact_best = 0;
    std::uint64_t arg = 0;
    if (best > 0) {
      std::map<std::vector<int>, std::uint64_t> seen;
      for (std::uint64_t v = 0; v < vcount; ++v) {
        if (score[v] < best * (1 - 1e-9)) continue;
        counts_at(v);
        seen.emplace(cnt, v);
      }
      bool have = false;
      for (const auto& [c, v] : seen) {
        Rational s = 0;
        for (std::size_t k = 0; k < c.size(); ++k) s += wq[k] * c[k];
        if (!have || s > exact_best || (s == exact_best && v < arg)) {
          exact_best = s;
          arg = v;
          have = true;
        }
      }
    }
    exact_best.canonicalize();
    out.per_message.push_back(exact_best);
    out.argmax_v.push_back(arg);
    out.total += exact_best;
  }
  out.total.canonicalize();
  return out;
}

namespace {

std::vector<Rational> sequence_probs(const std::vector<Rational>& p, int n, std::uint64_t count) {
  std::map<std::vector<int>, Rational> by_type;
  std::vector<Rational> out(count);
  for (std::uint64_t x = 0; x < count; ++x) {
    auto c = counts_of_code(x, n, p.size());
    auto it = by_type.find(c);
    if (it == by_type.end()) it = by_type.emplace(c, prob_of_counts(p, c)).first;
    out[x] = it->second;
  }
  return out;
}

AdversaryReport run_map(const BlurSystem& s, bool genie, const char* name) {
  const std::uint64_t X = s.encoder.size();
  auto px = sequence_probs(s.source_exact, s.n, X);
  ObservationModel model;
  model.n = s.n;
  model.nx = s.nx;
  std::map<std::pair<std::uint64_t, std::vector<int>>, std::size_t> index;
  for (std::uint64_t x = 0; x < X; ++x) {
    std::vector<int> key_type = genie ? counts_of_code(x, s.n, s.nx) : std::vector<int>{};
    auto key = std::make_pair(s.encoder[x], key_type);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, model.messages.size()).first;
      model.messages.emplace_back();
    }
    model.messages[it->second].push_back({x, px[x]});
  }
  MapOutcome mo = exact_map(model, s.spec_e);
  AdversaryReport r;
  r.strategy = name;
  r.n = s.n;
  set_exact(r, mo.total);
  Ball ball(s.spec_e, s.n, s.nx);
  for (std::size_t m = 0; m < model.messages.size(); ++m)
    for (const auto& [x, w] : model.messages[m])
      if (ball(x, mo.argmax_v[m])) r.per_type[counts_of_code(x, s.n, s.nx)] += to_double(w);
  r.diagnostics["messages"] = static_cast<double>(model.messages.size());
  return r;
}

}  // namespace

AdversaryReport map_adversary(const BlurSystem& s) { return run_map(s, false, "map"); }
AdversaryReport genie_map_adversary(const BlurSystem& s) { return run_map(s, true, "genie_map"); }

// ---------------------------------------------------------------------------
// Two-stage adversary

AdversaryReport two_stage_adversary(const BlurSystem& s, const TwoStageOptions& opt) {
  const std::uint64_t X = s.encoder.size();
  const std::size_t nv = s.spec_e.cols();
  TwoStage ts(s.spec_d, s.spec_e, s.n, s.nx, s.ny);
  std::map<std::uint64_t, std::vector<std::uint64_t>> by_y;
  for (std::uint64_t x = 0; x < X; ++x) by_y[s.encoder[x]].push_back(x);
  double work = 0;
  for (const auto& [y, xs] : by_y) work += ts.work(y, xs.size());

  AdversaryReport r;
  r.strategy = "two_stage";
  r.n = s.n;
  auto px = sequence_probs(s.source_exact, s.n, X);

  if (work > opt.exact_budget) {
    // Sampled fallback with a Wilson interval.
    Rng rng(derive_seed(opt.seed, 0x7453u));
    std::vector<double> cdf;
    double acc = 0;
    for (double v : s.source.probs()) cdf.push_back(acc += v);
    long hits = 0;
    for (long i = 0; i < opt.mc_samples; ++i) {
      Seq x(s.n);
      for (auto& a : x) {
        double u = rng.uniform() * acc;
        a = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        a = std::min<int>(a, static_cast<int>(s.nx) - 1);
      }
      std::uint64_t xc = encode_seq(x, s.nx);
      hits += ts.sample(xc, s.encoder[xc], rng);
    }
    const double S = static_cast<double>(opt.mc_samples), ph = hits / S, z = 1.96;
    const double den = 1 + z * z / S;
    r.monte_carlo = true;
    r.samples = opt.mc_samples;
    r.success = (ph + z * z / (2 * S)) / den;
    r.ci_radius = z * std::sqrt(ph * (1 - ph) / S + z * z / (4 * S * S)) / den;
    r.diagnostics["hits"] = static_cast<double>(hits);
    r.diagnostics["exact_work_estimate"] = work;
    finish(r);
    return r;
  }

  const int c = opt.bound_exponent > 0 ? opt.bound_exponent
                                       : static_cast<int>(s.nx * s.ny * (nv + 1));
  const ScaledCosts sd = scaled_costs(s.spec_d, s.n);
  Rational total = 0;
  long pairs = 0, violations = 0;
  double min_margin = kInf;
  std::map<JointTypeVec, double> istar;
  for (const auto& [y, xs] : by_y) {
    Seq ys = decode_seq(y, s.n, s.ny);
    for (auto x : xs) {
      Rational ps = ts.pair(x, y);
      Rational contrib = px[x] * ps;
      total += contrib;
      r.per_type[counts_of_code(x, s.n, s.nx)] += to_double(contrib);
      if (pair_cost(sd, x, y, s.n, s.nx, s.ny) > sd.level) continue;
      JointTypeVec jt = joint_type_of(decode_seq(x, s.n, s.nx), ys, s.nx, s.ny);
      auto it = istar.find(jt);
      if (it == istar.end()) it = istar.emplace(jt, type_conditional_mi(ts.extension(jt))).first;
      const double log_bound = -c * std::log2(s.n + 1.0) - s.n * it->second;
      const double margin = ps > 0 ? log2_rational(ps) - log_bound : -kInf;
      ++pairs;
      if (margin < -1e-9) ++violations;
      min_margin = std::min(min_margin, margin);
    }
  }
  total.canonicalize();
  set_exact(r, total);
  r.diagnostics["bound_pairs"] = static_cast<double>(pairs);
  r.diagnostics["bound_violations"] = static_cast<double>(violations);
  r.diagnostics["bound_min_margin_log2"] = min_margin;
  r.diagnostics["bound_exponent"] = c;
  return r;
}

// ---------------------------------------------------------------------------
// Keyed systems

KeyedSystem assemble_keyed_system(const Dist& p, int n, const DistortionSpec& spec_d,
                                  const DistortionSpec& spec_e, double R, double r_disc,
                                  double alpha, double delta,
                                  const std::map<TypeVec, KeyedCodebooks>& books) {
  check_system_shapes(p, spec_d, spec_e, n);
  require(r_disc >= 0, "keyed system: key rate must be >= 0");
  KeyedSystem s;
  s.source = p;
  s.source_exact = exact_source(p);
  s.n = n;
  s.spec_d = spec_d;
  s.spec_e = spec_e;
  s.nx = p.size();
  s.ny = spec_d.cols();
  s.R = R;
  s.r_disc = r_disc;
  s.alpha = alpha;
  s.delta = delta;
  const double keys = std::exp2(n * r_disc);
  require(std::fabs(keys - std::round(keys)) <= 1e-9 * std::round(keys),
          "keyed system: 2^(n r) must be an integer");
  s.num_keys = static_cast<int>(std::round(keys));

  int maxN = 1;
  for (const auto& [q, kb] : books) {
    require(q.n() == n && q.size() == s.nx, "keyed system: book type does not match n and |X|");
    require(static_cast<int>(kb.books.size()) == s.num_keys, "keyed system: each type needs 2^(n r) books");
    s.types.push_back(q);
    s.books.push_back(kb);
    s.epsilon = kb.epsilon;
    maxN = std::max(maxN, kb.codebook_size);
    TypeOptimum ch;
    ch.joint = kb.joint_type;
    ch.extension = pstar_n(kb.joint_type, spec_e);
    ch.pstar_value = type_conditional_mi(ch.extension);
    ch.crd_value = ch.value = conditional_rd(kb.joint_type.joint2(), spec_e).value;
    s.choices.push_back(ch);
    s.rprime.push_back(type_mutual_information(kb.joint_type));
  }
  s.type_bits = s.types.empty() ? 0 : index_bits_for(static_cast<long>(s.types.size()) + 1);
  s.index_bits = index_bits_for(maxN);
  s.message_bits = s.type_bits + s.index_bits;
  const int budget = static_cast<int>(std::floor(n * R + 1e-9));
  if (s.message_bits > budget) {
    std::ostringstream os;
    os << "keyed system: messages need " << s.message_bits << " bits (" << s.type_bits << " type + "
       << s.index_bits << " index) but n R allows " << budget;
    throw ValidationError(os.str());
  }

  s.dummy_mass = 0;
  for (const auto& q : enum_types(n, s.nx))
    if (!books.count(q)) s.dummy_mass += Rational(type_class_size(q)) * prob_of_counts(s.source_exact, q.counts());
  s.dummy_mass.canonicalize();
  if (std::isfinite(alpha) && s.dummy_mass > 0 &&
      log2_rational(s.dummy_mass) > -n * alpha + 1e-12) {
    std::ostringstream os;
    os << "keyed system: excess-distortion probability " << to_double(s.dummy_mass)
       << " exceeds 2^(-n alpha) = " << std::exp2(-n * alpha);
    throw ValidationError(os.str());
  }
  return s;
}

KeyedSystem build_keyed_system(const Dist& p, int n, const DistortionSpec& spec_d,
                               const DistortionSpec& spec_e, double R, double r_disc, double alpha,
                               double delta, const KeyedOptions& opt) {
  check_system_shapes(p, spec_d, spec_e, n);
  auto kept = low_prob_types(p, n, alpha, delta);
  const int type_bits = kept.empty() ? 0 : index_bits_for(static_cast<long>(kept.size()) + 1);
  const int budget = static_cast<int>(std::floor(n * R + 1e-9)) - type_bits;
  std::map<TypeVec, KeyedCodebooks> books;
  std::map<TypeVec, std::pair<TypeOptimum, double>> chosen;
  KeyedCodebookOptions kopt;
  kopt.allow_persistent = true;
  for (std::size_t t = 0; t < kept.size(); ++t) {
    const TypeVec& q = kept[t];
    double rp;
    if (opt.rprime) {
      rp = *opt.rprime;
    } else {
      // Largest cap such that every candidate at or below it fits; N is not
      // monotone in I because of the clip to |T_Y|.
      std::vector<std::pair<double, bool>> cand;
      double min_bad = kInf;
      for (const auto& jt : joint_types_given_marginal_x(q, spec_d.cols(), spec_d)) {
        const double I = type_mutual_information(jt);
        const bool fits = index_bits_for(keyed_codebook_size(jt, opt.epsilon)) <= budget;
        if (!fits) min_bad = std::min(min_bad, I);
        cand.push_back({I, fits});
      }
      rp = -1;
      for (const auto& [I, fits] : cand)
        if (fits && I < min_bad - 1e-9) rp = std::max(rp, I);
      if (rp < 0) {
        std::ostringstream os;
        os << "build_keyed_system: no joint type for type (";
        for (std::size_t a = 0; a < q.size(); ++a) os << (a ? "," : "") << q[a];
        os << ") fits the bit budget n R = " << n * R;
        throw ValidationError(os.str());
      }
    }
    TypeOptimum ch = qstar_rate(q, rp, spec_d, spec_e);
    if (index_bits_for(keyed_codebook_size(ch.joint, opt.epsilon)) > budget)
      throw ValidationError("build_keyed_system: the rate cap admits a codebook larger than the bit budget");
    books.emplace(q, keyed_codebooks(ch.joint, r_disc, opt.epsilon,
                                     derive_seed(opt.seed, 0x4B45u, t + 1), kopt));
    chosen.emplace(q, std::make_pair(ch, rp));
  }
  KeyedSystem s = assemble_keyed_system(p, n, spec_d, spec_e, R, r_disc, alpha, delta, books);
  for (std::size_t t = 0; t < s.types.size(); ++t) {
    const auto& [ch, rp] = chosen.at(s.types[t]);
    s.choices[t] = ch;
    s.rprime[t] = rp;
  }
  s.epsilon = opt.epsilon;
  return s;
}

std::uint64_t encode_message(const KeyedSystem& s, int type_id, int index) {
  return (static_cast<std::uint64_t>(type_id) << s.index_bits) | static_cast<std::uint64_t>(index);
}

std::pair<int, int> decode_message(const KeyedSystem& s, std::uint64_t m) {
  return {static_cast<int>(m >> s.index_bits), static_cast<int>(m & ((1ULL << s.index_bits) - 1))};
}

Seq keyed_decode(const KeyedSystem& s, int type_id, int index, int key) {
  if (type_id == 0) return Seq(s.n, 0);
  require(type_id <= static_cast<int>(s.types.size()), "keyed_decode: unknown type id");
  const auto& book = s.books[type_id - 1].books.at(key);
  return book.codewords.at(index);
}

EncoderLaw keyed_encoder_law(const KeyedSystem& s, const Seq& x, int key) {
  EncoderLaw out;
  TypeVec t = type_of(x, s.nx);
  auto it = std::lower_bound(s.types.begin(), s.types.end(), t);
  if (it == s.types.end() || !(*it == t)) {
    out.law.push_back({0, Rational(1)});
    return out;
  }
  out.type_id = static_cast<int>(it - s.types.begin()) + 1;
  const KeyedCodebooks& kb = s.books[out.type_id - 1];
  const auto& cover = kb.books.at(key).cover_index.at(encode_seq(x, s.nx));
  if (kb.event_E_flags[key] || cover.empty()) {
    for (int i = 0; i < kb.codebook_size; ++i) out.law.push_back({i, Rational(1, kb.codebook_size)});
  } else {
    Rational w(1, static_cast<long>(cover.size()));
    for (int i : cover) out.law.push_back({i, w});
  }
  return out;
}

AdversaryReport keyed_map_adversary(const KeyedSystem& s) {
  const std::uint64_t X = space_size(s.nx, s.n, kSequenceGuard, "keyed_map_adversary");
  auto px = sequence_probs(s.source_exact, s.n, X);
  std::map<std::uint64_t, std::map<std::uint64_t, Rational>> acc;
  const Rational key_w(1, s.num_keys);
  for (std::uint64_t x = 0; x < X; ++x) {
    Seq xs = decode_seq(x, s.n, s.nx);
    for (int k = 0; k < s.num_keys; ++k) {
      EncoderLaw law = keyed_encoder_law(s, xs, k);
      if (law.type_id == 0) {  // the dummy message does not depend on the key
        acc[encode_message(s, 0, 0)][x] += px[x];
        break;
      }
      for (const auto& [i, pr] : law.law) acc[encode_message(s, law.type_id, i)][x] += px[x] * key_w * pr;
    }
  }
  ObservationModel model;
  model.n = s.n;
  model.nx = s.nx;
  std::vector<std::uint64_t> codes;
  for (auto& [m, xs] : acc) {
    codes.push_back(m);
    model.messages.emplace_back();
    for (auto& [x, w] : xs) {
      w.canonicalize();
      model.messages.back().push_back({x, w});
    }
  }
  MapOutcome mo = exact_map(model, s.spec_e);

  AdversaryReport r;
  r.strategy = "keyed_map";
  r.n = s.n;
  set_exact(r, mo.total);
  Ball ball(s.spec_e, s.n, s.nx);
  for (std::size_t m = 0; m < model.messages.size(); ++m)
    for (const auto& [x, w] : model.messages[m])
      if (ball(x, mo.argmax_v[m])) r.per_type[counts_of_code(x, s.n, s.nx)] += to_double(w);

  // Per-message guessing bound for each coded type.
  std::vector<double> re(s.types.size());
  for (std::size_t t = 0; t < s.types.size(); ++t) re[t] = rd_function(s.types[t].dist(), s.spec_e).value;
  long violations = 0;
  std::vector<bool> etilde(s.types.size(), false);
  for (std::size_t m = 0; m < codes.size(); ++m) {
    auto [tid, idx] = decode_message(s, codes[m]);
    if (tid == 0) continue;
    Rational pm = 0;
    for (const auto& [x, w] : model.messages[m]) pm += w;
    MessageBound mb;
    mb.type_id = tid;
    mb.index = idx;
    mb.conditional_success = mo.per_message[m] / pm;
    mb.conditional_success.canonicalize();
    const double expo =
        std::min(re[tid - 1], s.r_disc + s.choices[tid - 1].crd_value) - 8 * s.epsilon;
    const double log_bound = -s.n * expo;
    mb.bound = std::exp2(log_bound);
    mb.holds = mb.conditional_success == 0 || log2_rational(mb.conditional_success) <= log_bound + 1e-12;
    if (!mb.holds) {
      ++violations;
      etilde[tid - 1] = true;
    }
    r.message_bounds.push_back(mb);
  }
  long et = 0;
  for (bool b : etilde) et += b;
  r.diagnostics["messages"] = static_cast<double>(codes.size());
  r.diagnostics["bound_violations"] = static_cast<double>(violations);
  r.diagnostics["etilde_types"] = static_cast<double>(et);
  r.diagnostics["dummy_mass"] = to_double(s.dummy_mass);
  return r;
}

AdversaryReport key_guess_adversary(const KeyedSystem& s, std::uint64_t seed) {
  (void)seed;  // evaluation is exact; kept for interface symmetry with sampled runs
  const std::uint64_t X = space_size(s.nx, s.n, kSequenceGuard, "key_guess_adversary");
  auto px = sequence_probs(s.source_exact, s.n, X);
  TwoStage ts(s.spec_d, s.spec_e, s.n, s.nx, s.ny);

  // Size check before the exact sum.
  std::map<std::uint64_t, long> ys;  // distinct reproductions -> uses
  for (int k = 0; k < s.num_keys; ++k) {
    ys[encode_seq(Seq(s.n, 0), s.ny)] += 1;
    for (std::size_t t = 0; t < s.types.size(); ++t)
      for (const auto& cw : s.books[t].books[k].codewords) ys[encode_seq(cw, s.ny)] += 1;
  }
  double work = 0;
  for (const auto& [y, c] : ys) work += ts.work(y, static_cast<std::size_t>(X));
  if (work > kPairGuard) {
    std::ostringstream os;
    os << "key_guess_adversary: exact evaluation needs about " << work << " ball tests (limit " << kPairGuard << ")";
    throw GuardError(os.str());
  }

  const Rational key_w(1, s.num_keys);
  Rational total = 0, correct = 0;
  AdversaryReport r;
  for (std::uint64_t x = 0; x < X; ++x) {
    Seq xs = decode_seq(x, s.n, s.nx);
    Rational sx = 0, cx = 0;
    for (int k = 0; k < s.num_keys; ++k) {
      EncoderLaw law = keyed_encoder_law(s, xs, k);
      for (const auto& [i, pr] : law.law) {
        Rational guess = 0;
        for (int kt = 0; kt < s.num_keys; ++kt) {
          Rational ps = ts.pair(x, encode_seq(keyed_decode(s, law.type_id, i, kt), s.ny));
          guess += ps;
          if (kt == k) cx += key_w * pr * ps;
        }
        sx += key_w * pr * guess * key_w;
      }
    }
    total += px[x] * sx;
    correct += px[x] * cx;
    r.per_type[counts_of_code(x, s.n, s.nx)] += to_double(px[x] * sx);
  }
  total.canonicalize();
  correct.canonicalize();
  r.strategy = "key_guess";
  r.n = s.n;
  set_exact(r, total);
  r.diagnostics["correct_key_success"] = to_double(correct);
  r.diagnostics["correct_key_share_holds"] = total * s.num_keys >= correct ? 1.0 : 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Blind guessing

AdversaryReport blind_adversary(const Dist& p, int n, const DistortionSpec& spec_e) {
  require(n >= 1, "blind_adversary: n must be >= 1");
  require(spec_e.rows() == p.size(), "blind_adversary: matrix rows must match the source alphabet");
  const auto px = exact_source(p);
  const ScaledCosts sc = scaled_costs(spec_e, n);
  const std::size_t nv = spec_e.cols();
  Rational best = -1;
  std::vector<int> arg;
  for (const auto& vt : enum_types(n, nv)) {
    // Distribution of the running scaled cost; sums above the level are dropped.
    std::map<long long, Rational> dist{{0, Rational(1)}};
    for (std::size_t b = 0; b < nv; ++b)
      for (int i = 0; i < vt[b]; ++i) {
        std::map<long long, Rational> next;
        for (const auto& [c, pr] : dist)
          for (std::size_t a = 0; a < p.size(); ++a) {
            if (px[a] == 0) continue;
            long long nc = c + sc.at(a, b);
            if (nc <= sc.level) next[nc] += pr * px[a];
          }
        dist.swap(next);
      }
    Rational s = 0;
    for (const auto& [c, pr] : dist) s += pr;
    s.canonicalize();
    if (s > best) {
      best = s;
      arg = vt.counts();
    }
  }
  AdversaryReport r;
  r.strategy = "blind";
  r.n = n;
  set_exact(r, best);
  for (std::size_t b = 0; b < arg.size(); ++b) r.diagnostics["argmax_v_count_" + std::to_string(b)] = arg[b];
  return r;
}

Trend exponent_trend(const std::function<AdversaryReport(int)>& report_fn,
                     const std::vector<int>& n_list, double theory) {
  Trend t;
  for (int n : n_list) {
    AdversaryReport rep = report_fn(n);
    TrendRow row;
    row.n = n;
    row.exact = rep.exact;
    row.success = rep.success;
    row.exponent = rep.empirical_exponent;
    row.theory = theory;
    row.gap = std::fabs(row.exponent - theory);
    if (!t.rows.empty()) {
      if (row.exponent < t.rows.back().exponent - 1e-12) t.exponent_increasing = false;
      if (!(row.gap < t.rows.back().gap)) t.gap_decreasing = false;
    }
    if (row.exponent > theory + 1e-12) t.below_theory = false;
    t.rows.push_back(row);
  }
  return t;
}

}  // namespace secexp
