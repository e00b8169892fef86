#include "secexp/oracle.hpp"

#include "secexp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace secexp::oracle {

namespace {

double h2(double q) {
  if (q <= 0 || q >= 1) return 0;
  return -q * std::log2(q) - (1 - q) * std::log2(1 - q);
}

struct Point {
  double e, i, a0, a1;
};

// (E[d | y], I(X;V | Y=y)) for P(V=1|x) = (a0, a1) and source (1-s, s).
Point slice_point(double s, double a0, double a1, const DistortionSpec& d) {
  double pv1 = (1 - s) * a0 + s * a1;
  double i = h2(pv1) - (1 - s) * h2(a0) - s * h2(a1);
  double e = (1 - s) * ((1 - a0) * d(0, 0) + a0 * d(0, 1)) +
             s * ((1 - a1) * d(1, 0) + a1 * d(1, 1));
  return {e, std::max(i, 0.0), a0, a1};
}

// Pareto frontier (increasing e, strictly decreasing i) of a point cloud.
std::vector<Point> frontier(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.e < b.e || (a.e == b.e && a.i < b.i);
  });
  std::vector<Point> f;
  for (const auto& p : pts)
    if (f.empty() || p.i < f.back().i) f.push_back(p);
  return f;
}

std::vector<Point> box_grid(double s, double c0, double c1, double half, double step,
                            const DistortionSpec& d) {
  std::vector<Point> pts;
  double lo0 = std::max(0.0, c0 - half), hi0 = std::min(1.0, c0 + half);
  double lo1 = std::max(0.0, c1 - half), hi1 = std::min(1.0, c1 + half);
  int n0 = static_cast<int>(std::round((hi0 - lo0) / step));
  int n1 = static_cast<int>(std::round((hi1 - lo1) / step));
  for (int i = 0; i <= n0; ++i)
    for (int k = 0; k <= n1; ++k) {
      double a0 = n0 ? lo0 + (hi0 - lo0) * i / n0 : lo0;
      double a1 = n1 ? lo1 + (hi1 - lo1) * k / n1 : lo1;
      pts.push_back(slice_point(s, a0, a1, d));
    }
  return pts;
}

struct Best {
  double value = std::numeric_limits<double>::infinity();
  Point p0{}, p1{};
};

// Combine two slice frontiers under w0*e0 + w1*e1 <= D.
Best combine(const std::vector<Point>& f0, const std::vector<Point>& f1, double w0, double w1,
             double D) {
  Best b;
  for (const auto& p : f0) {
    double budget = D - w0 * p.e;
    if (budget < -1e-15) continue;
    // Last frontier point of slice 1 within budget has the smallest i.
    auto it = std::upper_bound(f1.begin(), f1.end(), budget / w1 + 1e-15,
                               [](double v, const Point& q) { return v < q.e; });
    if (it == f1.begin()) continue;
    --it;
    double val = w0 * p.i + w1 * it->i;
    if (val < b.value) {
      b.value = val;
      b.p0 = p;
      b.p1 = *it;
    }
  }
  return b;
}

}  // namespace

BinaryCrdInstance random_binary_crd_instance(Rng& rng) {
  auto w = rng.dirichlet(4);
  Joint2 j(2, 2, Dist::normalize(w).probs());
  std::vector<double> m(4);
  for (auto& v : m) v = rng.uniform();
  DistortionSpec d(2, 2, m, 0.0);
  // Zero-rate distortion: each y picks its best constant reconstruction.
  double d0 = 0;
  for (int y = 0; y < 2; ++y) {
    double best = 1e300;
    for (int v = 0; v < 2; ++v) best = std::min(best, j(0, y) * d(0, v) + j(1, y) * d(1, v));
    d0 += best;
  }
  double lo = d.d_min(), hi = std::max(lo, d0);
  double level = lo + (hi - lo) * (0.05 + 0.9 * rng.uniform());
  return {j, d.with_level(level)};
}

double brute_conditional_rd_binary(const Joint2& j, const DistortionSpec& d) {
  require(j.nx() == 2 && j.ny() == 2 && d.rows() == 2 && d.cols() == 2,
          "brute_conditional_rd_binary: binary instances only");
  const double D = d.level();
  double w[2], s[2];
  for (int y = 0; y < 2; ++y) {
    w[y] = j(0, y) + j(1, y);
    s[y] = w[y] > 0 ? j(1, y) / w[y] : 0.0;
  }
  // A dead slice contributes nothing; the other slice takes the whole budget.
  if (w[0] <= 0 || w[1] <= 0) {
    int y = w[0] > 0 ? 0 : 1;
    auto f = frontier(box_grid(s[y], 0.5, 0.5, 0.5, 0.005, d));
    double best = std::numeric_limits<double>::infinity();
    Point c{};
    for (const auto& p : f)
      if (p.e <= D + 1e-15 && p.i < best) best = p.i, c = p;
    for (double step = 2e-4, half = 0.01; step > 1e-8; step /= 25, half /= 25) {
      for (const auto& p : frontier(box_grid(s[y], c.a0, c.a1, half, step, d)))
        if (p.e <= D + 1e-15 && p.i < best) best = p.i, c = p;
    }
    return best;
  }

  auto f0 = frontier(box_grid(s[0], 0.5, 0.5, 0.5, 0.005, d));
  auto f1 = frontier(box_grid(s[1], 0.5, 0.5, 0.5, 0.005, d));
  Best b = combine(f0, f1, w[0], w[1], D);
  for (double step = 2e-4, half = 0.01; step > 1e-8; step /= 25, half /= 25) {
    auto g0 = box_grid(s[0], b.p0.a0, b.p0.a1, half, step, d);
    auto g1 = box_grid(s[1], b.p1.a0, b.p1.a1, half, step, d);
    g0.push_back(b.p0);
    g1.push_back(b.p1);
    Best nb = combine(frontier(g0), frontier(g1), w[0], w[1], D);
    if (nb.value <= b.value) b = nb;
  }
  return b.value;
}

double binary_rd_hamming(double p1, double D) {
  double m = std::min(p1, 1 - p1);
  return D >= m ? 0.0 : h2(p1) - h2(D);
}

double binary_blur_hamming(double q, double D, double De) {
  double hq = h2(q), hd = h2(D), he = h2(De);
  if (hq <= he) return 0.0;
  if (hq <= hd) return hq - he;
  return hd - he;
}

std::pair<double, double> grid_min_1d(const std::function<double(double)>& f, double lo,
                                      double hi, double step) {
  int n = static_cast<int>(std::ceil((hi - lo) / step - 1e-9));
  double best = std::numeric_limits<double>::infinity(), arg = lo;
  for (int i = 0; i <= n; ++i) {
    double x = i == n ? hi : lo + i * step;
    double v = f(x);
    if (v < best) best = v, arg = x;
  }
  return {best, arg};
}

Rational binomial_cdf(int n, int k, const Rational& p) {
  Rational total = 0;
  Rational q = 1 - p;
  for (int i = 0; i <= std::min(k, n); ++i) {
    BigInt c;
    mpz_bin_uiui(c.get_mpz_t(), n, i);
    Rational term = c;
    for (int t = 0; t < i; ++t) term *= p;
    for (int t = 0; t < n - i; ++t) term *= q;
    total += term;
  }
  return total;
}

int exhaustive_min_cover(const std::vector<std::vector<bool>>& covers) {
  const std::size_t rows = covers.size();
  const std::size_t cols = rows ? covers[0].size() : 0;
  require(cols <= 20, "exhaustive_min_cover: too many columns");
  int best = -1;
  for (unsigned mask = 0; mask < (1u << cols); ++mask) {
    int size = __builtin_popcount(mask);
    if (best >= 0 && size >= best) continue;
    bool ok = true;
    for (std::size_t r = 0; r < rows && ok; ++r) {
      bool hit = false;
      for (std::size_t c = 0; c < cols && !hit; ++c) hit = (mask >> c & 1) && covers[r][c];
      ok = hit;
    }
    if (ok) best = size;
  }
  return best;
}

std::vector<std::vector<int>> all_count_tables(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(k, 0);
  std::function<void(int, int)> rec = [&](int cell, int left) {
    if (cell == k - 1) {
      cur[cell] = left;
      out.push_back(cur);
      return;
    }
    for (int c = left; c >= 0; --c) {
      cur[cell] = c;
      rec(cell + 1, left - c);
    }
  };
  if (k >= 1) rec(0, n);
  return out;
}

}  // namespace secexp::oracle
