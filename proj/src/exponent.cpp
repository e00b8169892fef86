#include "secexp/exponent.hpp"

#include "secexp/error.hpp"
#include "secexp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

namespace secexp {

namespace {

constexpr double kDistTol = 1e-7;  // matches the inner solver's distortion tolerance
constexpr double kRateTol = 1e-9;
constexpr double kTie = 1e-9;

void check_level(const DistortionSpec& s, const char* who) {
  if (s.level() < s.d_min() - 1e-12) {
    std::ostringstream os;
    os << who << ": level " << s.level() << " is below d_min = " << s.d_min();
    throw ValidationError(os.str());
  }
}

// ---------------------------------------------------------------------------
// Channel search for the worst-case side information.

class BlurSearch {
 public:
  BlurSearch(const Dist& p, double R, const DistortionSpec& d, const DistortionSpec& de,
             const SearchOptions& opt)
      : p_(p.probs()), nx_(p.size()), ny_(d.cols()), R_(R), d_(d), de_(de), opt_(opt),
        joint_(nx_ * ny_) {
    auto rd = rd_function(p, d, opt.rd);
    w_rd_ = rd.argmin_channel.table();
    rd_rate_ = rd.value;
    w_min_.assign(nx_ * ny_, 0.0);
    for (std::size_t x = 0; x < nx_; ++x) {
      std::size_t best = 0;
      for (std::size_t y = 1; y < ny_; ++y)
        if (d(x, y) < d(x, best)) best = y;
      w_min_[x * ny_ + best] = 1.0;
    }
    e_min_ = distortion(w_min_);
  }

  double rd_rate() const { return rd_rate_; }
  const std::vector<double>& rd_channel() const { return w_rd_; }

  double objective(const std::vector<double>& w) {
    for (std::size_t i = 0; i < w.size(); ++i) joint_[i] = p_[i / ny_] * w[i];
    return detail::conditional_rd_value(joint_.data(), nx_, ny_, de_, opt_.rd);
  }

  double distortion(const std::vector<double>& w) const {
    double e = 0;
    for (std::size_t i = 0; i < w.size(); ++i) e += p_[i / ny_] * w[i] * d_.matrix()[i];
    return e;
  }

  double rate(const std::vector<double>& w) {
    for (std::size_t i = 0; i < w.size(); ++i) joint_[i] = p_[i / ny_] * w[i];
    return mutual_information_raw(joint_.data(), nx_, ny_);
  }

  // Pull an infeasible point back: first toward the minimum-distortion
  // channel along a segment (distortion is linear), then toward the
  // rate-distortion channel until the rate fits.
  std::vector<double> project(std::vector<double> w) {
    const double D = d_.level();
    double e = distortion(w);
    if (e > D + kDistTol) {
      double t = e - e_min_ > 0 ? std::clamp((e - D) / (e - e_min_), 0.0, 1.0) : 1.0;
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = (1 - t) * w[i] + t * w_min_[i];
    }
    if (std::isfinite(R_) && rate(w) > R_ + kRateTol) {
      std::vector<double> m(w.size());
      auto mix = [&](double t) {
        for (std::size_t i = 0; i < w.size(); ++i) m[i] = (1 - t) * w[i] + t * w_rd_[i];
      };
      double lo = 0, hi = 1;
      while (hi - lo > 1e-9) {
        double mid = 0.5 * (lo + hi);
        mix(mid);
        if (rate(m) > R_ + kRateTol)
          lo = mid;
        else
          hi = mid;
      }
      mix(hi);
      w = m;
    }
    return w;
  }

  struct State {
    std::vector<double> w;
    double f = 0;
    int index = 0;
  };

  void climb(State& s, double from, double to) {
    double step = from;
    std::vector<double> cand;
    while (step >= to) {
      const double f0 = s.f;
      for (std::size_t x = 0; x < nx_; ++x) {
        if (p_[x] <= 0) continue;
        for (std::size_t a = 0; a < ny_; ++a)
          for (std::size_t b = 0; b < ny_; ++b) {
            if (a == b) continue;
            double m = std::min(step, s.w[x * ny_ + a]);
            if (m <= 1e-15) continue;
            cand = s.w;
            cand[x * ny_ + a] -= m;
            cand[x * ny_ + b] += m;
            cand = project(std::move(cand));
            double moved = 0;
            for (std::size_t i = 0; i < cand.size(); ++i)
              moved = std::max(moved, std::fabs(cand[i] - s.w[i]));
            if (moved < 1e-13) continue;
            double fc = objective(cand);
            if (fc > s.f + 1e-13) {
              s.w = cand;
              s.f = fc;
            }
          }
      }
      if (s.f - f0 <= opt_.rel_improvement * std::max(s.f, 1e-12)) step *= 0.5;
    }
  }

  BlurValue run(const Channel* warm) {
    std::vector<std::vector<double>> starts;
    starts.push_back(w_rd_);
    std::vector<double> marg(ny_, 0.0);
    for (std::size_t i = 0; i < w_rd_.size(); ++i) marg[i % ny_] += p_[i / ny_] * w_rd_[i];
    std::vector<double> indep(nx_ * ny_);
    for (std::size_t i = 0; i < indep.size(); ++i) indep[i] = marg[i % ny_];
    starts.push_back(indep);
    if (warm) {
      require(warm->inputs() == nx_ && warm->outputs() == ny_, "r_blur: warm start shape mismatch");
      starts.push_back(warm->table());
    }
    for (int k = 0; k < opt_.random_starts; ++k) {
      Rng rng(derive_seed(opt_.seed, 0xB1u, static_cast<std::uint64_t>(k)));
      std::vector<double> w;
      for (std::size_t x = 0; x < nx_; ++x) {
        auto row = rng.dirichlet(ny_);
        w.insert(w.end(), row.begin(), row.end());
      }
      starts.push_back(w);
    }

    std::vector<State> states;
    for (std::size_t i = 0; i < starts.size(); ++i) {
      State s;
      s.w = project(starts[i]);
      s.f = objective(s.w);
      s.index = static_cast<int>(i);
      climb(s, opt_.initial_step, opt_.coarse_min_step);
      states.push_back(std::move(s));
    }
    std::stable_sort(states.begin(), states.end(),
                     [](const State& a, const State& b) { return a.f > b.f; });
    const std::size_t keep =
        std::min<std::size_t>(states.size(), static_cast<std::size_t>(std::max(1, opt_.refine_starts)));
    for (std::size_t i = 0; i < keep; ++i) climb(states[i], 0.5 * opt_.coarse_min_step, opt_.min_step);
    const State* best = &states[0];
    for (std::size_t i = 1; i < keep; ++i)
      if (states[i].f > best->f + 1e-13 ||
          (std::fabs(states[i].f - best->f) <= 1e-13 && states[i].index < best->index))
        best = &states[i];

    std::vector<double> w = best->w;
    for (std::size_t x = 0; x < nx_; ++x) {
      double s = 0;
      for (std::size_t y = 0; y < ny_; ++y) s += (w[x * ny_ + y] = std::max(0.0, w[x * ny_ + y]));
      for (std::size_t y = 0; y < ny_; ++y) w[x * ny_ + y] /= s;
    }
    BlurValue out;
    out.argmax_channel = Channel::from_table(nx_, ny_, w);
    out.inner = conditional_rd(Joint2::compose(Dist(p_), out.argmax_channel), de_, opt_.rd);
    out.value = std::max(best->f, out.inner.value);
    out.starts_used = static_cast<int>(starts.size());
    return out;
  }

 private:
  std::vector<double> p_;
  std::size_t nx_, ny_;
  double R_;
  const DistortionSpec& d_;
  const DistortionSpec& de_;
  SearchOptions opt_;
  std::vector<double> joint_, w_rd_, w_min_;
  double e_min_ = 0, rd_rate_ = 0;
};

// ---------------------------------------------------------------------------
// Minimization over Q.

using QFn = std::function<double(const std::vector<double>&)>;

enum class Region { All, Inside, Outside };  // D(Q||P) unconstrained, <= alpha, >= alpha

struct QProblem {
  std::vector<double> p;
  double alpha = kInf;
  Region region = Region::All;
  QFn full;
  QFn lower;  // optional cheap lower bound on full
};

struct QBest {
  double value = kInf;
  std::vector<double> q;
  int evaluations = 0;

  // Strictly better values win; near-ties go to the lexicographically smaller q.
  void offer(double v, const std::vector<double>& cand) {
    if (!(v < kInf)) return;
    if (q.empty() || v < value - kTie || (v <= value + kTie && cand < q)) {
      q = cand;
      value = v;
    }
  }
};

double divergence(const std::vector<double>& q, const std::vector<double>& p) {
  double d = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] <= 0) continue;
    if (p[i] <= 0) return kInf;
    d += q[i] * std::log2(q[i] / p[i]);
  }
  return std::max(d, 0.0);
}

bool admissible(const QProblem& pr, const std::vector<double>& q) {
  if (pr.region == Region::All || !std::isfinite(pr.alpha)) return pr.region != Region::Outside;
  double d = divergence(q, pr.p);
  return pr.region == Region::Inside ? d <= pr.alpha + 1e-12 : d >= pr.alpha - 1e-12;
}

// Binary: feasible q1 intervals.
std::vector<std::pair<double, double>> binary_intervals(const QProblem& pr) {
  if (pr.region == Region::All || !std::isfinite(pr.alpha)) {
    if (pr.region == Region::Outside) return {};
    return {{0.0, 1.0}};
  }
  const double p1 = pr.p[1];
  auto dv = [&](double q1) { return divergence({1 - q1, q1}, pr.p); };
  auto edge = [&](double far) {
    if (dv(far) <= pr.alpha) return far;
    double in = p1, out = far;  // dv(in) = 0 <= alpha < dv(out)
    for (int i = 0; i < 200 && std::fabs(out - in) > 1e-15; ++i) {
      double mid = 0.5 * (in + out);
      (dv(mid) <= pr.alpha ? in : out) = mid;
    }
    return pr.region == Region::Inside ? in : out;
  };
  double lo = edge(0.0), hi = edge(1.0);
  if (pr.region == Region::Inside) return {{lo, hi}};
  std::vector<std::pair<double, double>> out;
  if (dv(0.0) >= pr.alpha) out.push_back({0.0, lo});
  if (dv(1.0) >= pr.alpha) out.push_back({hi, 1.0});
  return out;
}

// Lattice points k/N inside [a, b] plus both endpoints.
std::vector<double> lattice(double a, double b, double step) {
  std::vector<double> pts{a};
  const double inv = 1.0 / step;
  const bool exact = std::fabs(inv - std::round(inv)) < 1e-9;
  const double N = exact ? std::round(inv) : inv;
  long k0 = static_cast<long>(std::ceil(a * N - 1e-9));
  long k1 = static_cast<long>(std::floor(b * N + 1e-9));
  for (long k = k0; k <= k1; ++k) {
    double x = exact ? static_cast<double>(k) / N : k * step;
    if (x > a && x < b) pts.push_back(x);
  }
  if (b > a) pts.push_back(b);
  return pts;
}

QBest minimize_binary(const QProblem& pr, const SearchOptions& opt) {
  QBest best;
  auto ivs = binary_intervals(pr);
  if (ivs.empty()) return best;
  std::map<double, double> memo_full, memo_low;
  auto full = [&](double q1) {
    auto it = memo_full.find(q1);
    if (it != memo_full.end()) return it->second;
    ++best.evaluations;
    double v = pr.full({1 - q1, q1});
    memo_full[q1] = v;
    return v;
  };
  auto low = [&](double q1) {
    if (!pr.lower) return full(q1);
    auto it = memo_low.find(q1);
    if (it != memo_low.end()) return it->second;
    double v = pr.lower({1 - q1, q1});
    memo_low[q1] = v;
    return v;
  };
  auto take = [&](double q1) { best.offer(full(q1), {1 - q1, q1}); };
  auto containing = [&](double q1) {
    for (const auto& iv : ivs)
      if (q1 >= iv.first - 1e-15 && q1 <= iv.second + 1e-15) return iv;
    return ivs[0];
  };
  // Evaluate in order of increasing lower bound; stop once the bound alone
  // rules out an improvement beyond the tie tolerance. Cheap objectives are
  // evaluated everywhere so ties resolve over the whole lattice.
  auto sweep = [&](const std::vector<double>& pts) {
    std::vector<std::pair<double, double>> order;
    for (double q : pts) order.push_back({low(q), q});
    std::stable_sort(order.begin(), order.end());
    for (const auto& [lb, q] : order) {
      if (pr.lower && !best.q.empty() && lb >= best.value - kTie) break;
      take(q);
    }
  };

  const bool cheap = !pr.lower;
  std::vector<double> first;
  for (const auto& iv : ivs) {
    auto pts = lattice(iv.first, iv.second, cheap ? opt.q_grid_step : opt.q_coarse_step);
    first.insert(first.end(), pts.begin(), pts.end());
  }
  sweep(first);

  if (!cheap) {
    // Fine lattice around the most promising coarse points.
    std::vector<std::pair<double, double>> ranked;
    for (double q : first) {
      auto it = memo_full.find(q);
      if (it != memo_full.end()) ranked.push_back({it->second, q});
    }
    std::stable_sort(ranked.begin(), ranked.end());
    for (std::size_t i = 0; i < ranked.size() && i < 3; ++i) {
      if (ranked[i].first > best.value + 1e-2) break;
      auto iv = containing(ranked[i].second);
      double a = std::max(iv.first, ranked[i].second - opt.q_coarse_step);
      double b = std::min(iv.second, ranked[i].second + opt.q_coarse_step);
      sweep(lattice(a, b, opt.q_grid_step));
    }
  }

  // Golden-section polish around the incumbent.
  if (!best.q.empty()) {
    const double c = best.q[1];
    auto iv = containing(c);
    double a = std::max(iv.first, c - opt.q_grid_step), b = std::min(iv.second, c + opt.q_grid_step);
    const double g = 0.5 * (std::sqrt(5.0) - 1);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = full(x1), f2 = full(x2);
    for (int it = 0; it < 30 && b - a > opt.q_polish_tol; ++it) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - g * (b - a);
        f1 = full(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + g * (b - a);
        f2 = full(x2);
      }
    }
    take(x1);
    take(x2);
  }
  return best;
}

// Larger alphabets: multistart descent with pairwise mass transfers.
QBest minimize_simplex(const QProblem& pr, const SearchOptions& opt) {
  QBest best;
  const std::size_t k = pr.p.size();
  if (pr.region == Region::Outside && !std::isfinite(pr.alpha)) return best;
  const bool constrained = pr.region != Region::All && std::isfinite(pr.alpha);

  auto project = [&](std::vector<double> q) -> std::optional<std::vector<double>> {
    if (!constrained || admissible(pr, q)) return q;
    std::vector<double> m(k);
    if (pr.region == Region::Inside) {
      auto mix = [&](double t) {
        for (std::size_t i = 0; i < k; ++i) m[i] = (1 - t) * q[i] + t * pr.p[i];
      };
      double lo = 0, hi = 1;
      while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        mix(mid);
        (divergence(m, pr.p) <= pr.alpha ? hi : lo) = mid;
      }
      mix(hi);
      return m;
    }
    // Outside: push away from p along the ray through q.
    double smax = kInf;
    for (std::size_t i = 0; i < k; ++i)
      if (q[i] < pr.p[i]) smax = std::min(smax, pr.p[i] / (pr.p[i] - q[i]));
    if (!std::isfinite(smax)) return std::nullopt;
    auto ray = [&](double s) {
      for (std::size_t i = 0; i < k; ++i) m[i] = std::max(0.0, pr.p[i] + s * (q[i] - pr.p[i]));
    };
    ray(smax);
    if (divergence(m, pr.p) < pr.alpha) return std::nullopt;
    double lo = 1, hi = smax;
    while (hi - lo > 1e-12 * hi) {
      double mid = 0.5 * (lo + hi);
      ray(mid);
      (divergence(m, pr.p) >= pr.alpha ? hi : lo) = mid;
    }
    ray(hi);
    double s = 0;
    for (double v : m) s += v;
    for (double& v : m) v /= s;
    return m;
  };

  std::vector<std::vector<double>> starts{pr.p, std::vector<double>(k, 1.0 / static_cast<double>(k))};
  for (int i = 0; i < opt.q_random_starts; ++i) {
    Rng rng(derive_seed(opt.seed, 0xC0u, static_cast<std::uint64_t>(i)));
    starts.push_back(rng.dirichlet(k));
  }
  for (const auto& s0 : starts) {
    auto s = project(s0);
    if (!s) continue;
    std::vector<double> q = *s;
    double f = pr.full(q);
    ++best.evaluations;
    double step = 0.1;
    while (step >= opt.q_min_step) {
      bool moved = false;
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) {
          if (a == b) continue;
          double m = std::min(step, q[a]);
          if (m <= 1e-15) continue;
          std::vector<double> c = q;
          c[a] -= m;
          c[b] += m;
          auto pc = project(c);
          if (!pc) continue;
          if (pr.lower && pr.lower(*pc) >= f) continue;
          double fc = pr.full(*pc);
          ++best.evaluations;
          if (fc < f - 1e-13) {
            q = *pc;
            f = fc;
            moved = true;
          }
        }
      if (!moved) step *= 0.5;
    }
    best.offer(f, q);
  }
  return best;
}

QBest minimize_q(const QProblem& pr, const SearchOptions& opt) {
  return pr.p.size() == 2 ? minimize_binary(pr, opt) : minimize_simplex(pr, opt);
}

void check_source(const Dist& p, const char* who) {
  if (!p.full_support()) throw ValidationError(std::string(who) + ": source must have full support");
}

double rd_of(const std::vector<double>& q, const DistortionSpec& s, const RDOptions& o) {
  return detail::rd_value(q.data(), q.size(), s, o);
}

// min over the Q-region of D(Q||P) + blur(Q) with the rate constraint R.
QBest keyed_inner(const Dist& p, const DistortionSpec& d, const DistortionSpec& de, double R,
                  double alpha, const SearchOptions& opt, double shift,
                  const std::function<double(double, double)>& combine_with_re,
                  std::map<std::vector<double>, double>* cache = nullptr) {
  QProblem pr;
  pr.p = p.probs();
  pr.alpha = alpha;
  pr.region = std::isfinite(alpha) ? Region::Inside : Region::All;
  pr.full = [&](const std::vector<double>& q) {
    double b;
    auto it = cache ? cache->find(q) : decltype(cache->end()){};
    if (cache && it != cache->end()) {
      b = it->second;
    } else {
      b = r_blur_rate(Dist(q), R, d, de, opt).value;
      if (cache) (*cache)[q] = b;
    }
    return divergence(q, pr.p) + combine_with_re(shift + b, rd_of(q, de, opt.rd));
  };
  pr.lower = [&](const std::vector<double>& q) {
    double re = rd_of(q, de, opt.rd);
    double lb = std::max(0.0, re - rd_of(q, d, opt.rd));
    return divergence(q, pr.p) + combine_with_re(shift + lb, re);
  };
  return minimize_q(pr, opt);
}

}  // namespace

BlurValue r_blur(const Dist& p, const DistortionSpec& spec_d, const DistortionSpec& spec_e,
                 const SearchOptions& opt) {
  return r_blur_rate(p, kInf, spec_d, spec_e, opt);
}

BlurValue r_blur_rate(const Dist& p, double R, const DistortionSpec& spec_d,
                      const DistortionSpec& spec_e, const SearchOptions& opt,
                      const Channel* warm_start) {
  require(spec_d.rows() == p.size() && spec_e.rows() == p.size(),
          "r_blur: distortion matrices must have one row per source symbol");
  check_level(spec_d, "r_blur (legitimate)");
  check_level(spec_e, "r_blur (eavesdropper)");
  BlurSearch search(p, R, spec_d, spec_e, opt);
  if (std::isfinite(R) && R < search.rd_rate() - 1e-6) {
    std::ostringstream os;
    os << "r_blur_rate: rate " << R << " is below R(P,D) = " << search.rd_rate();
    throw ValidationError(os.str());
  }
  return search.run(warm_start);
}

double closed_form_binary(double q, double D, double De) {
  require(q > 0 && q < 1, "closed_form_binary: q must lie in (0,1)");
  require(De >= 0 && De <= D && D < 0.5, "closed_form_binary: need 0 <= D_e <= D < 1/2");
  double hq = binary_entropy(q), hd = binary_entropy(D), he = binary_entropy(De);
  if (hq <= he) return 0.0;
  if (hq <= hd) return hq - he;
  return hd - he;
}

ExponentResult exponent_perfect(const Dist& p, const DistortionSpec& spec_e,
                                const SearchOptions& opt) {
  check_source(p, "exponent_perfect");
  require(spec_e.rows() == p.size(), "exponent_perfect: matrix rows must match the source");
  check_level(spec_e, "exponent_perfect");
  QProblem pr;
  pr.p = p.probs();
  pr.full = [&](const std::vector<double>& q) { return divergence(q, pr.p) + rd_of(q, spec_e, opt.rd); };
  QBest b = minimize_q(pr, opt);
  ExponentResult r;
  r.value = b.value;
  r.argmin_q = Dist(b.q);
  r.branch = "perfect";
  r.diagnostics["divergence"] = divergence(b.q, pr.p);
  r.diagnostics["rate_e"] = rd_of(b.q, spec_e, opt.rd);
  r.diagnostics["evaluations"] = b.evaluations;
  return r;
}

ExponentResult exponent_nokey(const Dist& p, const DistortionSpec& spec_d,
                              const DistortionSpec& spec_e, const SearchOptions& opt) {
  check_source(p, "exponent_nokey");
  require(spec_d.rows() == p.size() && spec_e.rows() == p.size(),
          "exponent_nokey: matrix rows must match the source");
  check_level(spec_d, "exponent_nokey (legitimate)");
  check_level(spec_e, "exponent_nokey (eavesdropper)");
  QBest b = keyed_inner(p, spec_d, spec_e, kInf, kInf, opt, 0.0,
                        [](double blur, double) { return blur; });
  ExponentResult r;
  r.value = b.value;
  r.argmin_q = Dist(b.q);
  r.branch = "blur";
  r.diagnostics["divergence"] = divergence(b.q, p.probs());
  r.diagnostics["blur_value"] = b.value - r.diagnostics["divergence"];
  r.diagnostics["evaluations"] = b.evaluations;
  return r;
}

double compute_R_alpha(const Dist& p, const DistortionSpec& spec_d, double alpha,
                       const SearchOptions& opt) {
  require(spec_d.rows() == p.size(), "compute_R_alpha: matrix rows must match the source");
  require(alpha >= 0, "compute_R_alpha: alpha must be >= 0");
  check_level(spec_d, "compute_R_alpha");
  QProblem pr;
  pr.p = p.probs();
  pr.alpha = alpha;
  pr.region = std::isfinite(alpha) ? Region::Inside : Region::All;
  pr.full = [&](const std::vector<double>& q) { return -rd_of(q, spec_d, opt.rd); };
  QBest b = minimize_q(pr, opt);
  return std::max(-b.value, rd_of(p.probs(), spec_d, opt.rd));
}

namespace {

void check_a4(const Dist& p, const DistortionSpec& d, double R, double alpha,
              const SearchOptions& opt, double* r_alpha) {
  *r_alpha = compute_R_alpha(p, d, alpha, opt);
  if (!(R > *r_alpha)) {
    std::ostringstream os;
    os.precision(10);
    os << "channel rate R = " << R << " must exceed R_alpha = " << *r_alpha;
    throw ValidationError(os.str());
  }
}

void check_key_inputs(const Dist& p, const DistortionSpec& d, const DistortionSpec& de,
                      double r, double alpha, const char* who) {
  check_source(p, who);
  require(d.rows() == p.size() && de.rows() == p.size(),
          std::string(who) + ": matrix rows must match the source");
  check_level(d, who);
  check_level(de, who);
  require(r >= 0, std::string(who) + ": key rate must be >= 0");
  require(alpha > 0, std::string(who) + ": alpha must be > 0");
}

}  // namespace

ExponentResult exponent_key(const Dist& p, const DistortionSpec& spec_d,
                            const DistortionSpec& spec_e, double R, double r, double alpha,
                            const SearchOptions& opt) {
  check_key_inputs(p, spec_d, spec_e, r, alpha, "exponent_key");
  double r_alpha = 0;
  check_a4(p, spec_d, R, alpha, opt, &r_alpha);

  ExponentResult perfect = exponent_perfect(p, spec_e, opt);
  std::map<std::vector<double>, double> blur_cache;
  QBest keyed = keyed_inner(p, spec_d, spec_e, R, alpha, opt, 0.0,
                            [](double blur, double) { return blur; }, &blur_cache);
  const double direct = std::min(perfect.value, r + keyed.value);

  // Split form: outside the alpha-ball only the perfect term counts; inside,
  // each Q takes the smaller of the keyed and perfect terms.
  QBest inside = keyed_inner(p, spec_d, spec_e, R, alpha, opt, r,
                             [](double keyed_term, double re) { return std::min(keyed_term, re); },
                             &blur_cache);
  double outside = kInf;
  if (std::isfinite(alpha)) {
    QProblem pr;
    pr.p = p.probs();
    pr.alpha = alpha;
    pr.region = Region::Outside;
    pr.full = [&](const std::vector<double>& q) { return divergence(q, pr.p) + rd_of(q, spec_e, opt.rd); };
    outside = minimize_q(pr, opt).value;
  }
  const double split = std::min(outside, inside.value);

  ExponentResult res;
  res.value = direct;
  if (perfect.value <= r + keyed.value) {
    res.branch = "perfect";
    res.argmin_q = perfect.argmin_q;
  } else {
    res.branch = "keyed";
    res.argmin_q = Dist(keyed.q);
  }
  res.diagnostics["perfect_exponent"] = perfect.value;
  res.diagnostics["keyed_term"] = keyed.value;
  res.diagnostics["value_direct"] = direct;
  res.diagnostics["value_split"] = split;
  res.diagnostics["split_gap"] = std::fabs(direct - split);
  res.diagnostics["split_agrees"] = std::fabs(direct - split) <= 2e-3 ? 1.0 : 0.0;
  res.diagnostics["R_alpha"] = r_alpha;
  res.diagnostics["evaluations"] = keyed.evaluations + inside.evaluations;
  return res;
}

double min_key_rate(const Dist& p, const DistortionSpec& spec_d, const DistortionSpec& spec_e,
                    double R, double alpha, const SearchOptions& opt) {
  check_key_inputs(p, spec_d, spec_e, 0.0, alpha, "min_key_rate");
  double r_alpha = 0;
  check_a4(p, spec_d, R, alpha, opt, &r_alpha);
  double e0 = exponent_perfect(p, spec_e, opt).value;
  QBest keyed = keyed_inner(p, spec_d, spec_e, R, alpha, opt, 0.0,
                            [](double blur, double) { return blur; });
  return std::max(0.0, e0 - keyed.value);
}

RefinabilityReport successive_refinability_probe(const Dist& q, const DistortionSpec& spec_d,
                                                 const DistortionSpec& spec_e,
                                                 const SearchOptions& opt) {
  RefinabilityReport rep;
  BlurValue b = r_blur(q, spec_d, spec_e, opt);
  auto rd = rd_function(q, spec_d, opt.rd);
  rep.value = b.value;
  rep.r = rd.value;
  rep.re = rd_function(q, spec_e, opt.rd).value;
  rep.refinable = std::fabs(b.value - (rep.re - rep.r)) <= 2e-3;
  if (rep.refinable) {
    Joint2 xy = Joint2::compose(q, rd.argmin_channel);
    auto inner = conditional_rd(xy, spec_e, opt.rd);
    rep.rd_channel_value = inner.value;
    rep.rd_channel_near_optimal = inner.value >= b.value - 2e-3;
    Joint3 xyv = Joint3::compose(xy, inner.argmin_channel);
    // Reorder to (X, V, Y) so the conditional term is I(X;Y|V).
    std::vector<double> t(xyv.nx() * xyv.nv() * xyv.ny());
    for (std::size_t x = 0; x < xyv.nx(); ++x)
      for (std::size_t y = 0; y < xyv.ny(); ++y)
        for (std::size_t v = 0; v < xyv.nv(); ++v)
          t[(x * xyv.nv() + v) * xyv.ny() + y] = xyv(x, y, v);
    rep.markov_defect =
        conditional_mutual_information(Joint3(xyv.nx(), xyv.nv(), xyv.ny(), std::move(t)));
  }
  return rep;
}

}  // namespace secexp
