#include "secexp/rd.hpp"

#include "secexp/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace secexp {

namespace detail {

namespace {

constexpr double kCornerTol = 1e-12;

struct Eval {
  double value = 0;
  double distortion = 0;
};

// Blahut-Arimoto state for all slices of one problem. The kernel is shifted
// per row by the row minimum so large slopes never underflow a whole row.
class Engine {
 public:
  Engine(const SlicedProblem& pr, const RDOptions& opt)
      : pr_(pr), opt_(opt), q_(pr.ny * pr.nv, 1.0 / static_cast<double>(pr.nv)),
        a_(pr.nx * pr.nv), c_(pr.nx), cv_(pr.nv), rowmin_(pr.nx) {
    for (std::size_t x = 0; x < pr.nx; ++x)
      rowmin_[x] = *std::min_element(pr.d + x * pr.nv, pr.d + (x + 1) * pr.nv);
  }

  void set_slope(double lam) {
    for (std::size_t x = 0; x < pr_.nx; ++x)
      for (std::size_t v = 0; v < pr_.nv; ++v)
        a_[x * pr_.nv + v] = std::exp2(-lam * (pr_.d[x * pr_.nv + v] - rowmin_[x]));
    refresh_start();
  }

  void set_corner() {
    for (std::size_t x = 0; x < pr_.nx; ++x)
      for (std::size_t v = 0; v < pr_.nv; ++v)
        a_[x * pr_.nv + v] = pr_.d[x * pr_.nv + v] - rowmin_[x] <= kCornerTol ? 1.0 : 0.0;
    refresh_start();
  }

  // Slope search runs use the cheaper iteration cap and do not count
  // towards the convergence flag.
  Eval run(std::vector<double>* channel, bool searching = false) {
    limit_ = searching ? std::min(opt_.bracket_iterations, opt_.max_iterations) : opt_.max_iterations;
    if (!searching) converged_ = true;
    Eval e;
    if (channel) channel->assign(pr_.ny * pr_.nx * pr_.nv, 0.0);
    for (std::size_t y = 0; y < pr_.ny; ++y) {
      const double w = pr_.weight[y];
      if (w <= 0) {
        if (channel) fill_rowmin(&(*channel)[y * pr_.nx * pr_.nv]);
        continue;
      }
      Eval s = run_slice(y, channel ? &(*channel)[y * pr_.nx * pr_.nv] : nullptr, searching);
      e.value += w * s.value;
      e.distortion += w * s.distortion;
    }
    return e;
  }

  int iterations() const { return iterations_; }
  bool converged() const { return converged_; }

  void fill_rowmin(double* ch) const {
    for (std::size_t x = 0; x < pr_.nx; ++x) {
      const double* row = pr_.d + x * pr_.nv;
      std::size_t best = std::min_element(row, row + pr_.nv) - row;
      for (std::size_t v = 0; v < pr_.nv; ++v) ch[x * pr_.nv + v] = v == best ? 1.0 : 0.0;
    }
  }

 private:
  // Keep every output symbol alive when warm-starting: multiplicative updates
  // cannot revive an exact zero.
  void refresh_start() {
    const double u = 1.0 / static_cast<double>(pr_.nv);
    for (double& q : q_) q = 0.999 * q + 0.001 * u;
  }

  Eval run_slice(std::size_t y, double* ch, bool searching) {
    const std::size_t nx = pr_.nx, nv = pr_.nv;
    const double* p = &pr_.src[y * nx];
    double* q = &q_[y * nv];
    int it = 0;
    bool done = false;
    if (nv == 2) {
      it = solve_binary_output(p, q);
      done = true;
    }
    int next_polish = 4;
    for (; !done && it < limit_; ++it) {
      if (it == next_polish) {
        next_polish *= 2;
        if (newton_polish(p, q)) {
          done = true;
          break;
        }
      }
      compute_c(p, q);
      std::fill(cv_.begin(), cv_.end(), 0.0);
      for (std::size_t x = 0; x < nx; ++x) {
        if (p[x] <= 0) continue;
        const double s = p[x] / c_[x];
        for (std::size_t v = 0; v < nv; ++v) cv_[v] += s * a_[x * nv + v];
      }
      double mx = 0, tot = 0;
      for (std::size_t v = 0; v < nv; ++v) {
        mx = std::max(mx, cv_[v]);
        q[v] *= cv_[v];
        tot += q[v];
      }
      for (std::size_t v = 0; v < nv; ++v) q[v] /= tot;
      if (std::log2(mx) < opt_.gap_tol) {
        done = true;
        ++it;
        break;
      }
    }
    iterations_ += it;
    if (!done && !searching) converged_ = false;

    compute_c(p, q);
    std::fill(cv_.begin(), cv_.end(), 0.0);  // output marginal
    Eval e;
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t v = 0; v < nv; ++v) {
        double w = c_[x] > 0 ? q[v] * a_[x * nv + v] / c_[x] : 0.0;
        if (ch) ch[x * nv + v] = w;
        if (p[x] > 0) {
          cv_[v] += p[x] * w;
          e.distortion += p[x] * w * pr_.d[x * nv + v];
        }
      }
      if (ch && !(c_[x] > 0)) {
        const double* row = pr_.d + x * nv;
        std::size_t best = std::min_element(row, row + nv) - row;
        for (std::size_t v = 0; v < nv; ++v) ch[x * nv + v] = v == best ? 1.0 : 0.0;
      }
    }
    for (std::size_t x = 0; x < nx; ++x) {
      if (p[x] <= 0 || !(c_[x] > 0)) continue;
      for (std::size_t v = 0; v < nv; ++v) {
        double w = q[v] * a_[x * nv + v] / c_[x];
        if (w > 0) e.value += p[x] * w * std::log2(w / cv_[v]);
      }
    }
    if (e.value < 0) e.value = 0;
    return e;
  }

  // Two reproduction letters: the fixed point minimizes the convex function
  // G(t) = -sum_x p(x) log2((1-t) a(x,0) + t a(x,1)) of the output law
  // (1-t, t). Solve G'(t) = 0 directly with safeguarded Newton steps.
  int solve_binary_output(const double* p, double* q) {
    const std::size_t nx = pr_.nx;
    // g(t) = sum_x p(x) (a1 - a0) / c_x(t), decreasing in t; G' = -g / ln 2.
    auto g = [&](double t, double* dg) {
      double v = 0, d = 0;
      for (std::size_t x = 0; x < nx; ++x) {
        if (p[x] <= 0) continue;
        const double a0 = a_[x * 2], a1 = a_[x * 2 + 1];
        const double c = (1 - t) * a0 + t * a1;
        if (!(c > 0)) return a1 > a0 ? kInf : -kInf;
        const double r = (a1 - a0) / c;
        v += p[x] * r;
        d -= p[x] * r * r;
      }
      if (dg) *dg = d;
      return v;
    };
    double t;
    int steps = 0;
    if (g(0, nullptr) <= 0) {
      t = 0;
    } else if (g(1, nullptr) >= 0) {
      t = 1;
    } else {
      double lo = 0, hi = 1;
      t = std::clamp(q[1], 1e-12, 1 - 1e-12);
      for (; steps < 200 && hi - lo > 1e-15; ++steps) {
        double dg = 0;
        const double v = g(t, &dg);
        if (v == 0) break;
        (v > 0 ? lo : hi) = t;
        double next = dg < 0 ? t - v / dg : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - t) <= 1e-16) break;
        t = next;
      }
    }
    q[0] = 1 - t;
    q[1] = t;
    return steps + 1;
  }

  // Newton's method on the same convex function for larger output
  // alphabets, restricted to the current support. Letters whose mass would
  // turn negative leave the support. Succeeds only when the Lagrangian gap
  // certificate log2(max_v c_v) < gap_tol holds, so a success is as good as
  // a converged fixed point; on failure q is left untouched.
  bool newton_polish(const double* p, double* q) {
    const std::size_t nx = pr_.nx, nv = pr_.nv;
    std::vector<double> w(q, q + nv), trial(nv), d(nv), cv(nv), kkt;
    std::vector<char> in(nv);
    for (std::size_t v = 0; v < nv; ++v) in[v] = w[v] > 0;
    // F(w) = -sum_x p(x) ln c_x(w); fills cv with sum_x p(x) a(x,v) / c_x.
    auto eval = [&](const std::vector<double>& u, bool grad) {
      double f = 0;
      if (grad) std::fill(cv.begin(), cv.end(), 0.0);
      for (std::size_t x = 0; x < nx; ++x) {
        if (p[x] <= 0) continue;
        double c = 0;
        for (std::size_t v = 0; v < nv; ++v) c += u[v] * a_[x * nv + v];
        if (!(c > 0)) return kInf;
        f -= p[x] * std::log(c);
        if (grad)
          for (std::size_t v = 0; v < nv; ++v) cv[v] += p[x] * a_[x * nv + v] / c;
      }
      return f;
    };
    for (int iter = 0; iter < 60; ++iter) {
      const double f = eval(w, true);
      if (!std::isfinite(f)) return false;
      const double mx = *std::max_element(cv.begin(), cv.end());
      if (std::log2(mx) < opt_.gap_tol) {
        std::copy(w.begin(), w.end(), q);
        return true;
      }
      std::vector<std::size_t> S;
      for (std::size_t v = 0; v < nv; ++v)
        if (in[v]) S.push_back(v);
      const std::size_t k = S.size();
      // KKT system [H 1; 1' 0] [d; mu] = [cv; 0] on the support; the
      // gradient of F is -cv.
      kkt.assign((k + 1) * (k + 2), 0.0);
      auto at = [&](std::size_t r, std::size_t c) -> double& { return kkt[r * (k + 2) + c]; };
      for (std::size_t x = 0; x < nx; ++x) {
        if (p[x] <= 0) continue;
        double c = 0;
        for (std::size_t v = 0; v < nv; ++v) c += w[v] * a_[x * nv + v];
        const double s = p[x] / (c * c);
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) at(i, j) += s * a_[x * nv + S[i]] * a_[x * nv + S[j]];
      }
      for (std::size_t i = 0; i < k; ++i) {
        at(i, i) += 1e-14;
        at(i, k) = at(k, i) = 1;
        at(i, k + 1) = cv[S[i]];
      }
      if (!solve_dense(kkt, k + 1)) return false;
      std::fill(d.begin(), d.end(), 0.0);
      double slope = 0;
      for (std::size_t i = 0; i < k; ++i) {
        d[S[i]] = at(i, k + 1);
        slope -= cv[S[i]] * d[S[i]];
      }
      if (!(slope < 0)) return false;
      double tmax = 1;
      std::size_t block = nv;
      for (std::size_t v : S)
        if (d[v] < 0 && w[v] / -d[v] < tmax) {
          tmax = w[v] / -d[v];
          block = v;
        }
      double t = tmax;
      for (;;) {
        for (std::size_t v = 0; v < nv; ++v) trial[v] = std::max(0.0, w[v] + t * d[v]);
        if (t == tmax && block < nv) trial[block] = 0;
        if (eval(trial, false) <= f + 1e-4 * t * slope) break;
        t *= 0.5;
        block = nv;
        if (t < 1e-12) return false;
      }
      double tot = 0;
      for (double u : trial) tot += u;
      for (std::size_t v = 0; v < nv; ++v) w[v] = trial[v] / tot;
      if (block < nv) in[block] = 0;
    }
    return false;
  }

  // Gaussian elimination with partial pivoting on an n x (n+1) augmented
  // matrix stored with row stride n+1; the solution replaces the last column.
  static bool solve_dense(std::vector<double>& m, std::size_t n) {
    const std::size_t w = n + 1;
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < n; ++r)
        if (std::fabs(m[r * w + c]) > std::fabs(m[piv * w + c])) piv = r;
      if (std::fabs(m[piv * w + c]) < 1e-300) return false;
      for (std::size_t j = 0; j < w; ++j) std::swap(m[c * w + j], m[piv * w + j]);
      for (std::size_t r = 0; r < n; ++r) {
        if (r == c) continue;
        const double g = m[r * w + c] / m[c * w + c];
        if (g == 0) continue;
        for (std::size_t j = c; j < w; ++j) m[r * w + j] -= g * m[c * w + j];
      }
    }
    for (std::size_t r = 0; r < n; ++r) m[r * w + n] /= m[r * w + r];
    return true;
  }

  void compute_c(const double* p, const double* q) {
    for (std::size_t x = 0; x < pr_.nx; ++x) {
      double s = 0;
      if (p[x] > 0)
        for (std::size_t v = 0; v < pr_.nv; ++v) s += q[v] * a_[x * pr_.nv + v];
      c_[x] = s;
    }
  }

  const SlicedProblem& pr_;
  RDOptions opt_;
  std::vector<double> q_, a_, c_, cv_, rowmin_;
  int iterations_ = 0;
  int limit_ = 0;
  bool converged_ = true;
};

// Zero-rate solution: each slice reproduces its own best constant symbol.
double zero_rate_distortion(const SlicedProblem& pr, std::vector<double>* channel) {
  double total = 0;
  if (channel) channel->assign(pr.ny * pr.nx * pr.nv, 0.0);
  for (std::size_t y = 0; y < pr.ny; ++y) {
    double best = kInf;
    std::size_t arg = 0;
    for (std::size_t v = 0; v < pr.nv; ++v) {
      double e = 0;
      for (std::size_t x = 0; x < pr.nx; ++x) e += pr.src[y * pr.nx + x] * pr.d[x * pr.nv + v];
      if (e < best) {
        best = e;
        arg = v;
      }
    }
    if (pr.weight[y] > 0) total += pr.weight[y] * best;
    if (channel)
      for (std::size_t x = 0; x < pr.nx; ++x)
        (*channel)[(y * pr.nx + x) * pr.nv + arg] = 1.0;
  }
  return total;
}

double slope_cap(const SlicedProblem& pr) {
  double lo = kInf, hi = 0;
  for (std::size_t i = 0; i < pr.nx * pr.nv; ++i) {
    lo = std::min(lo, pr.d[i]);
    hi = std::max(hi, pr.d[i]);
  }
  return 50.0 / (hi - lo + 1e-9);
}

// Time-share two channels so the distortion lands on the target; the rate
// of the mix is at most the matching chord of the two rates.
Eval mix_to_target(const SlicedProblem& pr, const std::vector<double>& c1, const Eval& e1,
                   const std::vector<double>& c2, const Eval& e2, double target,
                   std::vector<double>* out) {
  const double t = (e1.distortion - target) / (e1.distortion - e2.distortion);
  std::vector<double> mix(c1.size());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = (1 - t) * c1[i] + t * c2[i];
  Eval e;
  std::vector<double> slice(pr.nx * pr.nv);
  for (std::size_t y = 0; y < pr.ny; ++y) {
    if (pr.weight[y] <= 0) continue;
    for (std::size_t x = 0; x < pr.nx; ++x)
      for (std::size_t v = 0; v < pr.nv; ++v) {
        double j = pr.src[y * pr.nx + x] * mix[(y * pr.nx + x) * pr.nv + v];
        slice[x * pr.nv + v] = j;
        e.distortion += pr.weight[y] * j * pr.d[x * pr.nv + v];
      }
    e.value += pr.weight[y] * mutual_information_raw(slice.data(), pr.nx, pr.nv);
  }
  if (out) *out = std::move(mix);
  return e;
}

}  // namespace

double min_achievable_distortion(const SlicedProblem& pr) {
  double total = 0;
  for (std::size_t y = 0; y < pr.ny; ++y) {
    if (pr.weight[y] <= 0) continue;
    for (std::size_t x = 0; x < pr.nx; ++x) {
      double m = *std::min_element(pr.d + x * pr.nv, pr.d + (x + 1) * pr.nv);
      total += pr.weight[y] * pr.src[y * pr.nx + x] * m;
    }
  }
  return total;
}

SlicedSolution solve_sliced(const SlicedProblem& pr, double target, bool want_channel,
                            const RDOptions& opt) {
  SlicedSolution out;
  std::vector<double>* ch = want_channel ? &out.channel : nullptr;

  const double d0 = zero_rate_distortion(pr, nullptr);
  if (target >= d0 - kCornerTol) {
    zero_rate_distortion(pr, ch);
    out.distortion = d0;
    out.slope = 0;
    return out;
  }

  Engine eng(pr, opt);
  const double dp = min_achievable_distortion(pr);
  auto finish = [&](const Eval& e, double slope) {
    out.value = e.value;
    out.distortion = e.distortion;
    out.slope = slope;
    out.iterations = eng.iterations();
    out.converged = eng.converged();
    return out;
  };
  if (target <= dp + kCornerTol) {
    eng.set_corner();
    return finish(eng.run(ch), kInf);
  }

  // Find a slope whose distortion is at or below the target.
  double hi = slope_cap(pr);
  eng.set_slope(hi);
  Eval ehi = eng.run(nullptr, true);
  for (int k = 0; k < 6 && ehi.distortion > target; ++k) {
    hi *= 4;
    eng.set_slope(hi);
    ehi = eng.run(nullptr, true);
  }
  if (ehi.distortion > target) {
    // Still short of the corner: mix the corner solution with the steepest one.
    std::vector<double> chh, chc;
    eng.set_slope(hi);
    Eval eh = eng.run(&chh);
    eng.set_corner();
    Eval ec = eng.run(&chc);
    return finish(mix_to_target(pr, chh, eh, chc, ec, target, ch), hi);
  }

  // Illinois regula falsi on the slope, with bisection when progress stalls.
  double a = 0, fa = d0 - target;
  double b = hi, fb = ehi.distortion - target;
  double best_slope = hi;
  int side = 0;
  double width_mark = b - a;
  for (int it = 0; it < 200 && b - a > opt.bracket_tol; ++it) {
    double c = (a * fb - b * fa) / (fb - fa);
    if ((it % 3 == 2 && b - a > 0.5 * width_mark) || !(c > a && c < b)) c = 0.5 * (a + b);
    if (it % 3 == 2) width_mark = b - a;
    eng.set_slope(c);
    Eval ec = eng.run(nullptr, true);
    double fc = ec.distortion - target;
    if (std::fabs(fc) <= opt.distortion_tol) {
      best_slope = c;
      break;
    }
    if (fc > 0) {
      a = c;
      fa = fc;
      if (side == 1) fb *= 0.5;
      side = 1;
    } else {
      b = c;
      fb = fc;
      best_slope = b;
      if (side == -1) fa *= 0.5;
      side = -1;
    }
  }
  eng.set_slope(best_slope);
  Eval e = eng.run(ch);
  if (std::fabs(e.distortion - target) <= opt.distortion_tol) return finish(e, best_slope);
  // A straight piece of the curve: one slope has a whole face of optimal
  // solutions spanning the target, and which end a solve lands on depends on
  // the warm start. Step slightly off that slope on both sides, where the
  // optimum is unique, and mix the two channels along the chord.
  std::vector<double> cha, chb;
  for (double eps : {1e-7, 1e-5, 1e-3}) {
    eng.set_slope(a * (1 - eps));
    Eval ea = eng.run(&cha);
    const bool conv = eng.converged();
    eng.set_slope(b * (1 + eps));
    Eval eb = eng.run(&chb);
    if (ea.distortion > target && eb.distortion < target) {
      finish(mix_to_target(pr, chb, eb, cha, ea, target, ch), best_slope);
      out.converged = out.converged && conv;
      return out;
    }
  }
  eng.set_slope(best_slope);
  return finish(eng.run(ch), best_slope);
}

double rd_value(const double* p, std::size_t nx, const DistortionSpec& spec,
                const RDOptions& opt) {
  SlicedProblem pr;
  pr.nx = nx;
  pr.nv = spec.cols();
  pr.ny = 1;
  pr.weight = {1.0};
  pr.src.assign(p, p + nx);
  pr.d = spec.matrix().data();
  return solve_sliced(pr, spec.level(), false, opt).value;
}

namespace {
SlicedProblem slices_of(const double* joint, std::size_t nx, std::size_t ny,
                        const DistortionSpec& spec_e) {
  SlicedProblem pr;
  pr.nx = nx;
  pr.nv = spec_e.cols();
  pr.ny = ny;
  pr.weight.assign(ny, 0.0);
  pr.src.assign(ny * nx, 0.0);
  pr.d = spec_e.matrix().data();
  for (std::size_t y = 0; y < ny; ++y) {
    double w = 0;
    for (std::size_t x = 0; x < nx; ++x) w += joint[x * ny + y];
    pr.weight[y] = w;
    if (w > 0)
      for (std::size_t x = 0; x < nx; ++x) pr.src[y * nx + x] = joint[x * ny + y] / w;
  }
  return pr;
}
}  // namespace

double conditional_rd_value(const double* joint, std::size_t nx, std::size_t ny,
                            const DistortionSpec& spec_e, const RDOptions& opt) {
  SlicedProblem pr = slices_of(joint, nx, ny, spec_e);
  return solve_sliced(pr, spec_e.level(), false, opt).value;
}

}  // namespace detail

std::pair<double, double> min_distortion_levels(const DistortionSpec& spec) {
  return {spec.d_min(), spec.d_max()};
}

namespace {
void check_level(const DistortionSpec& spec, const char* who) {
  if (spec.level() < spec.d_min() - 1e-12) {
    std::ostringstream os;
    os << who << ": level " << spec.level() << " is below d_min = " << spec.d_min();
    throw ValidationError(os.str());
  }
}
}  // namespace

RDResult rd_function(const Dist& p, const DistortionSpec& spec, const RDOptions& opt) {
  require(p.size() == spec.rows(), "rd_function: source alphabet does not match matrix rows");
  check_level(spec, "rd_function");
  detail::SlicedProblem pr;
  pr.nx = p.size();
  pr.nv = spec.cols();
  pr.ny = 1;
  pr.weight = {1.0};
  pr.src = p.probs();
  pr.d = spec.matrix().data();
  auto s = detail::solve_sliced(pr, spec.level(), true, opt);
  RDResult r;
  r.value = s.value;
  r.argmin_channel = Channel::from_table(pr.nx, pr.nv, s.channel);
  r.lagrange_slope = s.slope;
  r.achieved_distortion = s.distortion;
  r.iterations = s.iterations;
  r.converged = s.converged;
  return r;
}

double distortion_rate(const Dist& p, const DistortionSpec& spec, double R,
                       const RDOptions& opt) {
  require(p.size() == spec.rows(), "distortion_rate: source alphabet does not match matrix rows");
  require(R >= 0, "distortion_rate: negative rate");
  // D(R) is the inverse of R(D) on [D_p, D_0]; invert by bisection on the
  // level, which keeps every solve inside rd_function's own machinery.
  detail::SlicedProblem pr;
  pr.nx = p.size();
  pr.nv = spec.cols();
  pr.ny = 1;
  pr.weight = {1.0};
  pr.src = p.probs();
  pr.d = spec.matrix().data();
  const double dp = detail::min_achievable_distortion(pr);
  double d0 = kInf;
  for (std::size_t v = 0; v < pr.nv; ++v) {
    double e = 0;
    for (std::size_t x = 0; x < pr.nx; ++x) e += pr.src[x] * pr.d[x * pr.nv + v];
    d0 = std::min(d0, e);
  }
  if (R <= 0) return d0;
  if (detail::solve_sliced(pr, dp, false, opt).value <= R) return dp;
  double lo = dp, hi = d0;  // R(lo) > R >= R(hi)
  for (int it = 0; it < 200 && hi - lo > 1e-11; ++it) {
    double mid = 0.5 * (lo + hi);
    if (detail::solve_sliced(pr, mid, false, opt).value > R)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

CondRDResult conditional_rd(const Joint2& j, const DistortionSpec& spec_e,
                            const RDOptions& opt) {
  require(j.nx() == spec_e.rows(), "conditional_rd: source alphabet does not match matrix rows");
  check_level(spec_e, "conditional_rd");
  detail::SlicedProblem pr = detail::slices_of(j.table().data(), j.nx(), j.ny(), spec_e);
  auto s = detail::solve_sliced(pr, spec_e.level(), true, opt);
  CondRDResult r;
  r.value = s.value;
  r.achieved_distortion = s.distortion;
  r.iterations = s.iterations;
  r.converged = s.converged;
  r.per_y_slopes.assign(j.ny(), s.slope);
  for (std::size_t y = 0; y < j.ny(); ++y)
    if (pr.weight[y] <= 0) r.per_y_slopes[y] = 0;
  // Reorder [y][x][v] into rows indexed by x*|Y| + y.
  std::vector<double> t(j.nx() * j.ny() * pr.nv);
  for (std::size_t y = 0; y < j.ny(); ++y)
    for (std::size_t x = 0; x < j.nx(); ++x)
      for (std::size_t v = 0; v < pr.nv; ++v)
        t[(x * j.ny() + y) * pr.nv + v] = s.channel[(y * j.nx() + x) * pr.nv + v];
  r.argmin_channel = Channel::from_table(j.nx() * j.ny(), pr.nv, t);
  return r;
}

}  // namespace secexp
