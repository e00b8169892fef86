#include "secexp/types.hpp"

#include "secexp/error.hpp"
#include "secexp/rd.hpp"
#include "secexp/rng.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace secexp {

namespace {

constexpr double kObjTie = 1e-12;

double xlog(double c, double ratio) { return c > 0 ? c * std::log2(ratio) : 0.0; }

BigInt binom(unsigned long n, unsigned long k) {
  BigInt c;
  mpz_bin_uiui(c.get_mpz_t(), n, k);
  return c;
}

// Compositions of total into parts, first part ascending (lexicographic).
void compositions(int total, std::size_t parts, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> cur(parts, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i + 1 == parts) {
      cur[i] = left;
      fn(cur);
      return;
    }
    for (int c = 0; c <= left; ++c) {
      cur[i] = c;
      rec(i + 1, left - c);
    }
  };
  if (parts == 0) {
    if (total == 0) fn(cur);
    return;
  }
  rec(0, total);
}

std::vector<std::vector<int>> all_compositions(int total, std::size_t parts) {
  std::vector<std::vector<int>> out;
  compositions(total, parts, [&](const std::vector<int>& c) { out.push_back(c); });
  return out;
}

void guard(const BigInt& count, const std::string& what) {
  if (count > BigInt(static_cast<long>(kEnumGuard))) {
    std::ostringstream os;
    os << what << ": would enumerate " << count.get_str() << " objects (limit "
       << static_cast<long>(kEnumGuard) << ")";
    throw GuardError(os.str());
  }
}

BigInt composition_count(int total, std::size_t parts) {
  if (parts == 0) return total == 0 ? 1 : 0;
  return binom(static_cast<unsigned long>(total) + parts - 1, parts - 1);
}

std::vector<int> sorted_multiset(const std::vector<int>& counts) {
  std::vector<int> s;
  for (std::size_t a = 0; a < counts.size(); ++a) s.insert(s.end(), counts[a], static_cast<int>(a));
  return s;
}

void check_alphabet_fits(int n, std::size_t k) {
  if (k > 1 && n * std::log2(static_cast<double>(k)) > 63.0)
    throw GuardError("sequence codes: k^n exceeds 2^63");
}

// Enumerate every sequence of T_X into a code -> rank map.
std::unordered_map<std::uint64_t, int> index_type_class(const TypeVec& t, std::vector<std::uint64_t>* codes) {
  std::unordered_map<std::uint64_t, int> idx;
  for_each_sequence(t, [&](const Seq& s) {
    std::uint64_t c = encode_seq(s, t.size());
    idx.emplace(c, static_cast<int>(idx.size()));
    if (codes) codes->push_back(c);
  });
  return idx;
}

}  // namespace

std::uint64_t encode_seq(const Seq& s, std::size_t k) {
  check_alphabet_fits(static_cast<int>(s.size()), k);
  std::uint64_t c = 0;
  for (int a : s) c = c * k + static_cast<std::uint64_t>(a);
  return c;
}

Seq decode_seq(std::uint64_t code, int n, std::size_t k) {
  Seq s(n);
  for (int i = n - 1; i >= 0; --i) {
    s[i] = static_cast<int>(code % k);
    code /= k;
  }
  return s;
}

TypeVec::TypeVec(std::vector<int> counts) : c_(std::move(counts)) {
  require(!c_.empty(), "TypeVec: empty alphabet");
  for (int c : c_) require(c >= 0, "TypeVec: negative count");
  n_ = std::accumulate(c_.begin(), c_.end(), 0);
}

Dist TypeVec::dist() const {
  require(n_ > 0, "TypeVec::dist: n must be positive");
  std::vector<double> p(c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i) p[i] = static_cast<double>(c_[i]) / n_;
  return Dist::normalize(p);
}

TypeVec type_of(const Seq& s, std::size_t k) {
  std::vector<int> c(k, 0);
  for (int a : s) {
    require(a >= 0 && static_cast<std::size_t>(a) < k, "type_of: symbol out of range");
    ++c[a];
  }
  return TypeVec(c);
}

JointTypeVec::JointTypeVec(std::vector<std::size_t> dims, std::vector<int> counts)
    : dims_(std::move(dims)), c_(std::move(counts)) {
  require(dims_.size() == 2 || dims_.size() == 3, "JointTypeVec: need 2 or 3 axes");
  std::size_t total = 1;
  for (auto d : dims_) total *= d;
  require(total == c_.size() && total > 0, "JointTypeVec: count table does not match dims");
  for (int c : c_) require(c >= 0, "JointTypeVec: negative count");
  n_ = std::accumulate(c_.begin(), c_.end(), 0);
}

TypeVec JointTypeVec::marginal(std::size_t axis) const {
  require(axis < dims_.size(), "JointTypeVec::marginal: bad axis");
  std::vector<int> m(dims_[axis], 0);
  std::vector<std::size_t> idx(dims_.size(), 0);
  for (std::size_t i = 0; i < c_.size(); ++i) {
    std::size_t r = i;
    for (std::size_t a = dims_.size(); a-- > 0;) {
      idx[a] = r % dims_[a];
      r /= dims_[a];
    }
    m[idx[axis]] += c_[i];
  }
  return TypeVec(m);
}

JointTypeVec JointTypeVec::marginal_xy() const {
  require(dims_.size() == 3, "JointTypeVec::marginal_xy: need a three-way table");
  std::vector<int> m(dims_[0] * dims_[1], 0);
  for (std::size_t i = 0; i < c_.size(); ++i) m[i / dims_[2]] += c_[i];
  return JointTypeVec({dims_[0], dims_[1]}, m);
}

Joint2 JointTypeVec::joint2() const {
  require(dims_.size() == 2 && n_ > 0, "JointTypeVec::joint2: need a two-way table");
  std::vector<double> t(c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i) t[i] = static_cast<double>(c_[i]) / n_;
  return Joint2(dims_[0], dims_[1], Dist::normalize(t).probs());
}

Joint3 JointTypeVec::joint3() const {
  require(dims_.size() == 3 && n_ > 0, "JointTypeVec::joint3: need a three-way table");
  std::vector<double> t(c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i) t[i] = static_cast<double>(c_[i]) / n_;
  return Joint3(dims_[0], dims_[1], dims_[2], Dist::normalize(t).probs());
}

JointTypeVec joint_type_of(const Seq& x, const Seq& y, std::size_t nx, std::size_t ny) {
  require(x.size() == y.size(), "joint_type_of: length mismatch");
  std::vector<int> c(nx * ny, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] >= 0 && static_cast<std::size_t>(x[i]) < nx && y[i] >= 0 &&
                static_cast<std::size_t>(y[i]) < ny,
            "joint_type_of: symbol out of range");
    ++c[x[i] * ny + y[i]];
  }
  return JointTypeVec({nx, ny}, c);
}

ScaledCosts scaled_costs(const DistortionSpec& spec, int n) {
  BigInt lcm = 1;
  auto add = [&](const Rational& q) { mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), q.get_den_mpz_t()); };
  for (std::size_t x = 0; x < spec.rows(); ++x)
    for (std::size_t y = 0; y < spec.cols(); ++y) add(spec.exact(x, y));
  add(spec.exact_level());
  ScaledCosts s;
  s.cols = spec.cols();
  const BigInt limit = BigInt(1) << 62;
  for (std::size_t x = 0; x < spec.rows(); ++x)
    for (std::size_t y = 0; y < spec.cols(); ++y) {
      Rational v = spec.exact(x, y) * lcm;
      BigInt vi = v.get_num();
      if (vi * std::max(n, 1) >= limit) throw GuardError("scaled_costs: distortion scale overflows");
      s.cost.push_back(vi.get_si());
    }
  Rational lv = spec.exact_level() * lcm * n;
  BigInt lvi = lv.get_num();
  if (lvi >= limit) throw GuardError("scaled_costs: distortion scale overflows");
  s.level = lvi.get_si();
  return s;
}

double type_mutual_information(const JointTypeVec& jt) {
  require(jt.dims().size() == 2 && jt.n() > 0, "type_mutual_information: need a two-way table");
  const auto nx = jt.dims()[0], ny = jt.dims()[1];
  auto qx = jt.marginal(0), qy = jt.marginal(1);
  double n = jt.n(), s = 0;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      double c = jt(x, y);
      s += xlog(c, c * n / (static_cast<double>(qx[x]) * qy[y]));
    }
  return std::max(0.0, s / n);
}

double type_conditional_mi(const JointTypeVec& jt3) {
  require(jt3.dims().size() == 3 && jt3.n() > 0, "type_conditional_mi: need a three-way table");
  const auto nx = jt3.dims()[0], ny = jt3.dims()[1], nv = jt3.dims()[2];
  std::vector<double> cxy(nx * ny, 0), cyv(ny * nv, 0), cy(ny, 0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t v = 0; v < nv; ++v) {
        double c = jt3(x, y, v);
        cxy[x * ny + y] += c;
        cyv[y * nv + v] += c;
        cy[y] += c;
      }
  double s = 0;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t v = 0; v < nv; ++v) {
        double c = jt3(x, y, v);
        s += xlog(c, c * cy[y] / (cxy[x * ny + y] * cyv[y * nv + v]));
      }
  return std::max(0.0, s / jt3.n());
}

std::vector<TypeVec> enum_types(int n, std::size_t k) {
  require(n >= 1 && k >= 1, "enum_types: need n >= 1 and k >= 1");
  guard(composition_count(n, k), "enum_types");
  std::vector<TypeVec> out;
  compositions(n, k, [&](const std::vector<int>& c) { out.emplace_back(c); });
  return out;
}

BigInt type_class_size(const TypeVec& t) { return multinomial(t.counts()); }

std::vector<JointTypeVec> joint_types_given_marginal_x(const TypeVec& q, std::size_t ysize,
                                                       const DistortionSpec& spec_d) {
  require(spec_d.rows() == q.size() && spec_d.cols() == ysize,
          "joint_types_given_marginal_x: matrix shape must be |X| x |Y|");
  const std::size_t nx = q.size();
  BigInt total = 1;
  std::vector<std::vector<std::vector<int>>> rows(nx);
  for (std::size_t x = 0; x < nx; ++x) total *= composition_count(q[x], ysize);
  guard(total, "joint_types_given_marginal_x");
  for (std::size_t x = 0; x < nx; ++x) rows[x] = all_compositions(q[x], ysize);
  const ScaledCosts sc = scaled_costs(spec_d, q.n());

  std::vector<JointTypeVec> out;
  std::vector<int> cur(nx * ysize);
  std::function<void(std::size_t, long long)> rec = [&](std::size_t x, long long cost) {
    if (x == nx) {
      out.emplace_back(std::vector<std::size_t>{nx, ysize}, cur);
      return;
    }
    for (const auto& r : rows[x]) {
      long long c = cost;
      for (std::size_t y = 0; y < ysize; ++y) c += r[y] * sc.at(x, y);
      if (c > sc.level) continue;
      std::copy(r.begin(), r.end(), cur.begin() + x * ysize);
      rec(x + 1, c);
    }
  };
  rec(0, 0);
  return out;
}

std::vector<JointTypeVec> joint_types_given_marginal_y(const TypeVec& qy, std::size_t xsize,
                                                       const DistortionSpec& spec_d) {
  require(spec_d.rows() == xsize && spec_d.cols() == qy.size(),
          "joint_types_given_marginal_y: matrix shape must be |X| x |Y|");
  const std::size_t ny = qy.size();
  BigInt total = 1;
  for (std::size_t y = 0; y < ny; ++y) total *= composition_count(qy[y], xsize);
  guard(total, "joint_types_given_marginal_y");
  std::vector<std::vector<std::vector<int>>> cols(ny);
  for (std::size_t y = 0; y < ny; ++y) cols[y] = all_compositions(qy[y], xsize);
  const ScaledCosts sc = scaled_costs(spec_d, qy.n());

  std::vector<JointTypeVec> out;
  std::vector<int> cur(xsize * ny);
  std::function<void(std::size_t, long long)> rec = [&](std::size_t y, long long cost) {
    if (y == ny) {
      out.emplace_back(std::vector<std::size_t>{xsize, ny}, cur);
      return;
    }
    for (const auto& col : cols[y]) {
      long long c = cost;
      for (std::size_t x = 0; x < xsize; ++x) c += col[x] * sc.at(x, y);
      if (c > sc.level) continue;
      for (std::size_t x = 0; x < xsize; ++x) cur[x * ny + y] = col[x];
      rec(y + 1, c);
    }
  };
  rec(0, 0);
  std::sort(out.begin(), out.end());
  return out;
}

JointTypeVec pstar_n(const JointTypeVec& jt, const DistortionSpec& spec_e) {
  require(jt.dims().size() == 2, "pstar_n: need an X x Y joint type");
  const std::size_t nx = jt.dims()[0], ny = jt.dims()[1], nv = spec_e.cols();
  require(spec_e.rows() == nx, "pstar_n: eavesdropper matrix rows must match |X|");
  BigInt total = 1;
  for (int c : jt.counts()) total *= composition_count(c, nv);
  guard(total, "pstar_n");
  const ScaledCosts sc = scaled_costs(spec_e, jt.n());

  // Cheapest possible completion from each cell onward, for pruning.
  const std::size_t cells = nx * ny;
  std::vector<long long> tail(cells + 1, 0);
  for (std::size_t i = cells; i-- > 0;) {
    std::size_t x = i / ny;
    long long m = LLONG_MAX;
    for (std::size_t v = 0; v < nv; ++v) m = std::min(m, sc.at(x, v));
    tail[i] = tail[i + 1] + m * jt.counts()[i];
  }
  if (tail[0] > sc.level) {
    std::ostringstream os;
    os << "pstar_n: D_e = " << spec_e.level() << " is below the smallest distortion attainable at n = "
       << jt.n();
    throw EmptyFeasibleSet(os.str());
  }

  std::vector<std::vector<std::vector<int>>> opts(cells);
  for (std::size_t i = 0; i < cells; ++i) opts[i] = all_compositions(jt.counts()[i], nv);
  std::vector<int> cur(cells * nv);
  std::vector<int> best;
  double best_val = kInf;
  const std::vector<std::size_t> dims{nx, ny, nv};
  std::function<void(std::size_t, long long)> rec = [&](std::size_t i, long long cost) {
    if (i == cells) {
      double v = type_conditional_mi(JointTypeVec(dims, cur));
      if (v < best_val - kObjTie) {
        best_val = v;
        best = cur;
      }
      return;
    }
    const std::size_t x = i / ny;
    for (const auto& o : opts[i]) {
      long long c = cost;
      for (std::size_t v = 0; v < nv; ++v) c += o[v] * sc.at(x, v);
      if (c + tail[i + 1] > sc.level) continue;
      std::copy(o.begin(), o.end(), cur.begin() + i * nv);
      rec(i + 1, c);
    }
  };
  rec(0, 0);
  return JointTypeVec(dims, best);
}

TypeOptimum qstar(const TypeVec& q, const DistortionSpec& spec_d, const DistortionSpec& spec_e) {
  auto cands = joint_types_given_marginal_x(q, spec_d.cols(), spec_d);
  if (cands.empty()) throw EmptyFeasibleSet("qstar: no joint type meets the distortion level");
  TypeOptimum best;
  bool have = false;
  for (const auto& jt : cands) {
    JointTypeVec ext = pstar_n(jt, spec_e);
    double v = type_conditional_mi(ext);
    if (!have || v > best.value + kObjTie) {
      best.joint = jt;
      best.extension = ext;
      best.value = best.pstar_value = v;
      have = true;
    }
  }
  return best;
}

TypeOptimum qstar_rate(const TypeVec& q, double Rprime, const DistortionSpec& spec_d,
                       const DistortionSpec& spec_e) {
  auto cands = joint_types_given_marginal_x(q, spec_d.cols(), spec_d);
  TypeOptimum best;
  bool have = false;
  for (const auto& jt : cands) {
    if (type_mutual_information(jt) > Rprime + kObjTie) continue;
    double v = conditional_rd(jt.joint2(), spec_e).value;
    if (!have || v > best.value + kObjTie) {
      best.joint = jt;
      best.value = best.crd_value = v;
      have = true;
    }
  }
  if (!have) {
    std::ostringstream os;
    os << "qstar_rate: no joint type meets the distortion level with I(X;Y) <= " << Rprime;
    throw EmptyFeasibleSet(os.str());
  }
  best.extension = pstar_n(best.joint, spec_e);
  best.pstar_value = type_conditional_mi(best.extension);
  return best;
}

void for_each_sequence(const TypeVec& t, const std::function<void(const Seq&)>& fn) {
  Seq s = sorted_multiset(t.counts());
  do fn(s);
  while (std::next_permutation(s.begin(), s.end()));
}

void for_each_conditional(const Seq& given, const std::vector<std::vector<int>>& counts,
                          std::size_t out_size, const std::function<void(const Seq&)>& fn) {
  const std::size_t groups = counts.size();
  std::vector<std::vector<std::size_t>> pos(groups);
  for (std::size_t i = 0; i < given.size(); ++i) {
    require(given[i] >= 0 && static_cast<std::size_t>(given[i]) < groups,
            "for_each_conditional: symbol out of range");
    pos[given[i]].push_back(i);
  }
  std::vector<Seq> vals(groups);
  for (std::size_t b = 0; b < groups; ++b) {
    require(counts[b].size() == out_size, "for_each_conditional: count row has the wrong size");
    int tot = std::accumulate(counts[b].begin(), counts[b].end(), 0);
    if (static_cast<std::size_t>(tot) != pos[b].size()) return;  // no such sequence
    vals[b] = sorted_multiset(counts[b]);
  }
  Seq out(given.size());
  std::function<void(std::size_t)> rec = [&](std::size_t b) {
    if (b == groups) {
      fn(out);
      return;
    }
    Seq& v = vals[b];
    std::sort(v.begin(), v.end());
    do {
      for (std::size_t i = 0; i < v.size(); ++i) out[pos[b][i]] = v[i];
      rec(b + 1);
    } while (std::next_permutation(v.begin(), v.end()));
  };
  rec(0);
}

void for_each_x_given_y(const JointTypeVec& jt, const Seq& y,
                        const std::function<void(const Seq&)>& fn) {
  const std::size_t nx = jt.dims()[0], ny = jt.dims()[1];
  std::vector<std::vector<int>> counts(ny, std::vector<int>(nx));
  for (std::size_t b = 0; b < ny; ++b)
    for (std::size_t a = 0; a < nx; ++a) counts[b][a] = jt(a, b);
  for_each_conditional(y, counts, nx, fn);
}

CoverCode greedy_cover(const JointTypeVec& jt) {
  require(jt.dims().size() == 2, "greedy_cover: need an X x Y joint type");
  const std::size_t nx = jt.dims()[0], ny = jt.dims()[1];
  const TypeVec qx = jt.marginal(0), qy = jt.marginal(1);
  const BigInt tx = type_class_size(qx), ty = type_class_size(qy);
  if (tx > 1000000 || ty > 1000000)
    throw GuardError("greedy_cover: |T_X| = " + tx.get_str() + ", |T_Y| = " + ty.get_str() +
                     " (limit 10^6)");
  BigInt per_y = 1;
  for (std::size_t b = 0; b < ny; ++b) {
    std::vector<int> col(nx);
    for (std::size_t a = 0; a < nx; ++a) col[a] = jt(a, b);
    per_y *= multinomial(col);
  }
  guard(per_y * ty, "greedy_cover");

  std::vector<std::uint64_t> xcodes;
  auto xidx = index_type_class(qx, &xcodes);
  std::vector<Seq> ys;
  for_each_sequence(qy, [&](const Seq& y) { ys.push_back(y); });
  std::vector<std::vector<int>> covers(ys.size());
  for (std::size_t j = 0; j < ys.size(); ++j)
    for_each_x_given_y(jt, ys[j], [&](const Seq& x) { covers[j].push_back(xidx.at(encode_seq(x, nx))); });

  // Lazy greedy: stored gains are upper bounds; ties go to the smaller y.
  std::vector<char> covered(xcodes.size(), 0);
  std::size_t left = xcodes.size();
  std::priority_queue<std::pair<long, long>> pq;  // (gain, -index)
  for (std::size_t j = 0; j < ys.size(); ++j) pq.push({static_cast<long>(covers[j].size()), -static_cast<long>(j)});
  CoverCode code;
  code.joint_type = jt;
  std::vector<int> chosen;
  while (left > 0 && !pq.empty()) {
    auto [g, negj] = pq.top();
    pq.pop();
    const std::size_t j = static_cast<std::size_t>(-negj);
    long gain = 0;
    for (int x : covers[j]) gain += !covered[x];
    if (gain == 0) continue;
    if (!pq.empty() && std::make_pair(gain, negj) < pq.top()) {
      pq.push({gain, negj});
      continue;
    }
    for (int x : covers[j])
      if (!covered[x]) covered[x] = 1, --left;
    chosen.push_back(static_cast<int>(j));
  }
  if (left != 0) throw std::logic_error("greedy_cover: failed to cover the type class");

  for (auto c : xcodes) code.cover_index[c];
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    code.codewords.push_back(ys[chosen[i]]);
    for (int x : covers[chosen[i]]) code.cover_index[xcodes[x]].push_back(static_cast<int>(i));
  }
  for (auto& [c, v] : code.cover_index)
    if (v.empty()) throw std::logic_error("greedy_cover: uncovered sequence after construction");
  code.log2_size_bound = static_cast<double>(nx * ny) * std::log2(jt.n() + 1.0) +
                         jt.n() * type_mutual_information(jt);
  return code;
}

int keyed_codebook_size(const JointTypeVec& jt, double epsilon) {
  require(jt.dims().size() == 2 && jt.n() > 0, "keyed_codebook_size: need an X x Y joint type");
  const int n = jt.n();
  const double I = type_mutual_information(jt);
  const double ty = to_double(Rational(type_class_size(jt.marginal(1))));
  const double hi = std::floor(std::exp2(n * (I + epsilon)) * (1 + 1e-12));
  const double lo = std::ceil(std::exp2(n * (I + 2 * epsilon / 3)) * (1 - 1e-12));
  const double N = std::max(1.0, std::min(std::max(hi, lo), ty));
  if (N > 1e6) throw GuardError("keyed_codebooks: codebook size exceeds 10^6");
  return static_cast<int>(N);
}

KeyedCodebooks keyed_codebooks(const JointTypeVec& jt, double r_disc, double epsilon,
                               std::uint64_t seed, const KeyedCodebookOptions& opt) {
  require(jt.dims().size() == 2 && jt.n() > 0, "keyed_codebooks: need an X x Y joint type");
  require(r_disc >= 0, "keyed_codebooks: key rate must be >= 0");
  require(epsilon > 0, "keyed_codebooks: epsilon must be > 0");
  const int n = jt.n();
  const std::size_t nx = jt.dims()[0];
  const double books_real = std::exp2(n * r_disc);
  const double books_round = std::round(books_real);
  if (std::fabs(books_real - books_round) > 1e-9 * books_round) {
    std::ostringstream os;
    os << "keyed_codebooks: 2^(n r) = " << books_real << " is not an integer";
    throw ValidationError(os.str());
  }
  if (books_round > 1e6) throw GuardError("keyed_codebooks: more than 10^6 books");
  const int B = static_cast<int>(books_round);

  const TypeVec qx = jt.marginal(0), qy = jt.marginal(1);
  if (type_class_size(qx) > 1000000) throw GuardError("keyed_codebooks: |T_X| exceeds 10^6");
  const double I = type_mutual_information(jt);
  const int N = keyed_codebook_size(jt, epsilon);
  const double cap = std::exp2(2 * n * epsilon);

  std::vector<std::uint64_t> xcodes;
  auto xidx = index_type_class(qx, &xcodes);
  const Seq ybase = sorted_multiset(qy.counts());

  KeyedCodebooks out;
  out.joint_type = jt;
  out.epsilon = epsilon;
  out.codebook_size = N;
  for (int b = 0; b < B; ++b) {
    CoverCode book;
    bool bad = true;
    int attempt = 0;
    for (; attempt <= opt.max_retries; ++attempt) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(attempt)));
      book = CoverCode{};
      book.joint_type = jt;
      std::vector<std::vector<int>> hits(xcodes.size());
      for (int i = 0; i < out.codebook_size; ++i) {
        Seq y = ybase;
        for (std::size_t k = y.size(); k > 1; --k) std::swap(y[k - 1], y[rng.below(k)]);
        for_each_x_given_y(jt, y, [&](const Seq& x) { hits[xidx.at(encode_seq(x, nx))].push_back(i); });
        book.codewords.push_back(std::move(y));
      }
      bad = false;
      for (std::size_t k = 0; k < xcodes.size(); ++k) {
        if (hits[k].empty() || static_cast<double>(hits[k].size()) > cap) bad = true;
        book.cover_index[xcodes[k]] = std::move(hits[k]);
      }
      book.log2_size_bound = n * (I + epsilon);
      if (!bad) break;
    }
    if (bad && !opt.allow_persistent) {
      std::ostringstream os;
      os << "keyed_codebooks: book " << b << " still shows event E after " << opt.max_retries
         << " retries (n = " << n << ", epsilon = " << epsilon << ", N = " << out.codebook_size << ")";
      throw PersistentEventError(os.str());
    }
    out.books.push_back(std::move(book));
    out.event_E_flags.push_back(bad);
    out.retries.push_back(std::min(attempt, opt.max_retries));
  }
  return out;
}

RatioCheck conditional_ratio_bound_check(const JointTypeVec& jt3, const Seq& x, const Seq& y) {
  require(jt3.dims().size() == 3, "conditional_ratio_bound_check: need an X x Y x V joint type");
  const std::size_t nx = jt3.dims()[0], ny = jt3.dims()[1], nv = jt3.dims()[2];
  require(static_cast<int>(x.size()) == jt3.n(), "conditional_ratio_bound_check: length mismatch");
  if (!(joint_type_of(x, y, nx, ny) == jt3.marginal_xy()))
    throw ValidationError("conditional_ratio_bound_check: (x, y) is not in the joint type class");
  BigInt num = 1, den = 1;
  for (std::size_t b = 0; b < ny; ++b) {
    std::vector<int> col(nv, 0);
    for (std::size_t a = 0; a < nx; ++a) {
      std::vector<int> cell(nv);
      for (std::size_t v = 0; v < nv; ++v) col[v] += (cell[v] = jt3(a, b, v));
      num *= multinomial(cell);
    }
    den *= multinomial(col);
  }
  RatioCheck r;
  r.ratio = Rational(num, den);
  r.ratio.canonicalize();
  const int n = jt3.n();
  const double log_bound = -static_cast<double>(nx * ny * nv) * std::log2(n + 1.0) -
                           n * type_conditional_mi(jt3);
  r.bound = std::exp2(log_bound);
  r.holds = log2_rational(r.ratio) >= log_bound - 1e-9;
  return r;
}

std::vector<TypeVec> low_prob_types(const Dist& p, int n, double alpha, double delta) {
  require(alpha >= 0 && delta >= 0, "low_prob_types: alpha and delta must be >= 0");
  auto all = enum_types(n, p.size());
  if (!std::isfinite(alpha) || !std::isfinite(delta)) return all;
  std::vector<TypeVec> out;
  for (auto& t : all)
    if (kl_divergence(t.dist(), p) <= alpha + delta + 1e-12) out.push_back(t);
  return out;
}

bool ball_membership(const Seq& x, const Seq& v, const DistortionSpec& spec_e) {
  require(x.size() == v.size(), "ball_membership: length mismatch");
  const ScaledCosts sc = scaled_costs(spec_e, static_cast<int>(x.size()));
  long long s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] >= 0 && static_cast<std::size_t>(x[i]) < spec_e.rows() && v[i] >= 0 &&
                static_cast<std::size_t>(v[i]) < spec_e.cols(),
            "ball_membership: symbol out of range");
    s += sc.at(x[i], v[i]);
  }
  return s <= sc.level;
}

}  // namespace secexp
