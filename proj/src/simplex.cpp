#include "secexp/simplex.hpp"

#include "secexp/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace secexp {

namespace {

void check_probs(const std::vector<double>& p, const char* what) {
  require(!p.empty(), std::string(what) + ": empty alphabet");
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0) || !std::isfinite(p[i])) {
      std::ostringstream os;
      os << what << ": entry " << i << " = " << p[i] << " is not a probability";
      throw ValidationError(os.str());
    }
    s += p[i];
  }
  if (std::fabs(s - 1.0) > kSumTol) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": entries sum to " << s;
    throw ValidationError(os.str());
  }
}

double plogp(double p) { return p > 0 ? p * std::log2(p) : 0.0; }

}  // namespace

Dist::Dist(std::vector<double> probs) : p_(std::move(probs)) { check_probs(p_, "Dist"); }

Dist Dist::normalize(std::vector<double> w) {
  require(!w.empty(), "normalize: empty weights");
  double s = 0;
  for (double x : w) {
    require(x >= 0 && std::isfinite(x), "normalize: negative or non-finite weight");
    s += x;
  }
  require(s > 0, "normalize: zero total weight");
  for (double& x : w) x /= s;
  return Dist(std::move(w));
}

Dist Dist::uniform(std::size_t k) {
  require(k >= 1, "uniform: empty alphabet");
  return Dist(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

Dist Dist::point(std::size_t k, std::size_t i) {
  require(i < k, "point: index out of range");
  std::vector<double> p(k, 0.0);
  p[i] = 1.0;
  return Dist(std::move(p));
}

Dist Dist::bernoulli(double p1) {
  require(p1 >= 0 && p1 <= 1, "bernoulli: parameter outside [0,1]");
  return Dist({1.0 - p1, p1});
}

bool Dist::full_support() const {
  return std::all_of(p_.begin(), p_.end(), [](double x) { return x > 0; });
}

Channel::Channel(std::vector<Dist> rows) : rows_(std::move(rows)) {
  require(!rows_.empty(), "Channel: no rows");
  for (const auto& r : rows_)
    require(r.size() == rows_[0].size(), "Channel: ragged rows");
}

Channel Channel::from_table(std::size_t inputs, std::size_t outputs,
                            const std::vector<double>& table) {
  require(table.size() == inputs * outputs, "Channel: table size mismatch");
  std::vector<Dist> rows;
  rows.reserve(inputs);
  for (std::size_t x = 0; x < inputs; ++x)
    rows.emplace_back(std::vector<double>(table.begin() + x * outputs,
                                          table.begin() + (x + 1) * outputs));
  return Channel(std::move(rows));
}

std::vector<double> Channel::table() const {
  std::vector<double> t;
  t.reserve(inputs() * outputs());
  for (const auto& r : rows_) t.insert(t.end(), r.probs().begin(), r.probs().end());
  return t;
}

Joint2::Joint2(std::size_t nx, std::size_t ny, std::vector<double> table)
    : nx_(nx), ny_(ny), t_(std::move(table)) {
  require(nx >= 1 && ny >= 1, "Joint2: empty alphabet");
  require(t_.size() == nx * ny, "Joint2: table size mismatch");
  check_probs(t_, "Joint2");
}

Joint2 Joint2::product(const Dist& px, const Dist& py) {
  std::vector<double> t(px.size() * py.size());
  for (std::size_t x = 0; x < px.size(); ++x)
    for (std::size_t y = 0; y < py.size(); ++y) t[x * py.size() + y] = px[x] * py[y];
  return Joint2(px.size(), py.size(), std::move(t));
}

Joint2 Joint2::compose(const Dist& px, const Channel& w) {
  require(w.inputs() == px.size(), "Joint2::compose: channel input size mismatch");
  const std::size_t ny = w.outputs();
  std::vector<double> t(px.size() * ny);
  for (std::size_t x = 0; x < px.size(); ++x)
    for (std::size_t y = 0; y < ny; ++y) t[x * ny + y] = px[x] * w(x, y);
  return Joint2(px.size(), ny, std::move(t));
}

Dist Joint2::marginal_x() const {
  std::vector<double> m(nx_, 0.0);
  for (std::size_t x = 0; x < nx_; ++x)
    for (std::size_t y = 0; y < ny_; ++y) m[x] += t_[x * ny_ + y];
  return Dist(std::move(m));
}

Dist Joint2::marginal_y() const {
  std::vector<double> m(ny_, 0.0);
  for (std::size_t x = 0; x < nx_; ++x)
    for (std::size_t y = 0; y < ny_; ++y) m[y] += t_[x * ny_ + y];
  return Dist(std::move(m));
}

Channel Joint2::channel_y_given_x() const {
  std::vector<Dist> rows;
  for (std::size_t x = 0; x < nx_; ++x) {
    std::vector<double> r(t_.begin() + x * ny_, t_.begin() + (x + 1) * ny_);
    double s = 0;
    for (double v : r) s += v;
    rows.push_back(s > 0 ? Dist::normalize(std::move(r)) : Dist::uniform(ny_));
  }
  return Channel(std::move(rows));
}

Joint3::Joint3(std::size_t nx, std::size_t ny, std::size_t nv, std::vector<double> table)
    : nx_(nx), ny_(ny), nv_(nv), t_(std::move(table)) {
  require(nx >= 1 && ny >= 1 && nv >= 1, "Joint3: empty alphabet");
  require(t_.size() == nx * ny * nv, "Joint3: table size mismatch");
  check_probs(t_, "Joint3");
}

Joint3 Joint3::compose(const Joint2& xy, const Channel& w) {
  require(w.inputs() == xy.nx() * xy.ny(), "Joint3::compose: channel input size mismatch");
  const std::size_t nv = w.outputs();
  std::vector<double> t(xy.nx() * xy.ny() * nv);
  for (std::size_t x = 0; x < xy.nx(); ++x)
    for (std::size_t y = 0; y < xy.ny(); ++y)
      for (std::size_t v = 0; v < nv; ++v)
        t[(x * xy.ny() + y) * nv + v] = xy(x, y) * w(x * xy.ny() + y, v);
  return Joint3(xy.nx(), xy.ny(), nv, std::move(t));
}

Joint2 Joint3::marginal_xy() const {
  std::vector<double> m(nx_ * ny_, 0.0);
  for (std::size_t x = 0; x < nx_; ++x)
    for (std::size_t y = 0; y < ny_; ++y)
      for (std::size_t v = 0; v < nv_; ++v) m[x * ny_ + y] += (*this)(x, y, v);
  return Joint2(nx_, ny_, std::move(m));
}

Joint2 Joint3::marginal_xv() const {
  std::vector<double> m(nx_ * nv_, 0.0);
  for (std::size_t x = 0; x < nx_; ++x)
    for (std::size_t y = 0; y < ny_; ++y)
      for (std::size_t v = 0; v < nv_; ++v) m[x * nv_ + v] += (*this)(x, y, v);
  return Joint2(nx_, nv_, std::move(m));
}

Joint2 Joint3::marginal_yv() const {
  std::vector<double> m(ny_ * nv_, 0.0);
  for (std::size_t x = 0; x < nx_; ++x)
    for (std::size_t y = 0; y < ny_; ++y)
      for (std::size_t v = 0; v < nv_; ++v) m[y * nv_ + v] += (*this)(x, y, v);
  return Joint2(ny_, nv_, std::move(m));
}

DistortionSpec::DistortionSpec(std::size_t rows, std::size_t cols,
                               std::vector<double> matrix, double level)
    : rows_(rows), cols_(cols), m_(std::move(matrix)), level_(level) {
  require(m_.size() == rows * cols, "DistortionSpec: matrix size mismatch");
  require(std::isfinite(level) && level >= 0, "DistortionSpec: level must be finite and >= 0");
  check();
  mq_.reserve(m_.size());
  for (double v : m_) mq_.push_back(rationalize(v));
  level_q_ = rationalize(level);
}

DistortionSpec::DistortionSpec(std::size_t rows, std::size_t cols,
                               std::vector<Rational> matrix, Rational level)
    : rows_(rows), cols_(cols), mq_(std::move(matrix)), level_q_(std::move(level)) {
  require(mq_.size() == rows * cols, "DistortionSpec: matrix size mismatch");
  require(level_q_ >= 0, "DistortionSpec: level must be >= 0");
  m_.reserve(mq_.size());
  for (const auto& v : mq_) m_.push_back(v.get_d());
  level_ = level_q_.get_d();
  check();
}

void DistortionSpec::check() const {
  require(rows_ >= 1 && cols_ >= 1, "DistortionSpec: empty alphabet");
  for (std::size_t i = 0; i < m_.size(); ++i) {
    if (!(m_[i] >= 0) || !std::isfinite(m_[i])) {
      std::ostringstream os;
      os << "DistortionSpec: entry (" << i / cols_ << "," << i % cols_ << ") = " << m_[i]
         << " must be finite and >= 0";
      throw ValidationError(os.str());
    }
  }
}

DistortionSpec DistortionSpec::hamming(std::size_t k, double level) {
  return hamming(k, rationalize(level));
}

DistortionSpec DistortionSpec::hamming(std::size_t k, const Rational& level) {
  std::vector<Rational> m(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) m[i * k + j] = i == j ? 0 : 1;
  return DistortionSpec(k, k, std::move(m), level);
}

DistortionSpec DistortionSpec::constant(std::size_t rows, std::size_t cols, double c,
                                        double level) {
  return DistortionSpec(rows, cols, std::vector<double>(rows * cols, c), level);
}

double DistortionSpec::d_min() const {
  double best = 0;
  for (std::size_t x = 0; x < rows_; ++x) {
    double r = *std::min_element(m_.begin() + x * cols_, m_.begin() + (x + 1) * cols_);
    best = std::max(best, r);
  }
  return best;
}

double DistortionSpec::d_max() const { return *std::max_element(m_.begin(), m_.end()); }

bool DistortionSpec::is_hamming() const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (mq_[i * cols_ + j] != (i == j ? 0 : 1)) return false;
  return true;
}

DistortionSpec DistortionSpec::with_level(double level) const {
  return with_level(rationalize(level));
}

DistortionSpec DistortionSpec::with_level(const Rational& level) const {
  return DistortionSpec(rows_, cols_, mq_, level);
}

double entropy_raw(const double* p, std::size_t k) {
  double h = 0;
  for (std::size_t i = 0; i < k; ++i) h -= plogp(p[i]);
  return h > 0 ? h : 0.0;
}

double mutual_information_raw(const double* t, std::size_t nx, std::size_t ny) {
  std::vector<double> px(nx, 0.0), py(ny, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      px[x] += t[x * ny + y];
      py[y] += t[x * ny + y];
    }
  double i = 0;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      double j = t[x * ny + y];
      if (j > 0) i += j * std::log2(j / (px[x] * py[y]));
    }
  return i > 0 ? i : 0.0;
}

double entropy(const Dist& p) { return entropy_raw(p.probs().data(), p.size()); }

double binary_entropy(double q) {
  require(q >= 0 && q <= 1, "binary_entropy: argument outside [0,1]");
  return -plogp(q) - plogp(1 - q);
}

double kl_divergence(const Dist& q, const Dist& p) {
  require(q.size() == p.size(), "kl_divergence: alphabet mismatch");
  double d = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] <= 0) continue;
    if (p[i] <= 0) return kInf;
    d += q[i] * std::log2(q[i] / p[i]);
  }
  return d > 0 ? d : 0.0;
}

double mutual_information(const Joint2& j) {
  return mutual_information_raw(j.table().data(), j.nx(), j.ny());
}

double conditional_entropy_x_given_y(const Joint2& j) {
  double h = 0;
  for (std::size_t y = 0; y < j.ny(); ++y) {
    double py = 0;
    for (std::size_t x = 0; x < j.nx(); ++x) py += j(x, y);
    for (std::size_t x = 0; x < j.nx(); ++x)
      if (j(x, y) > 0) h -= j(x, y) * std::log2(j(x, y) / py);
  }
  return h > 0 ? h : 0.0;
}

double conditional_mutual_information(const Joint3& j) {
  double total = 0;
  std::vector<double> slice(j.nx() * j.nv());
  for (std::size_t y = 0; y < j.ny(); ++y) {
    double py = 0;
    for (std::size_t x = 0; x < j.nx(); ++x)
      for (std::size_t v = 0; v < j.nv(); ++v) py += (slice[x * j.nv() + v] = j(x, y, v));
    if (py <= 0) continue;
    for (double& s : slice) s /= py;
    total += py * mutual_information_raw(slice.data(), j.nx(), j.nv());
  }
  return total;
}

double expected_distortion(const Joint2& j, const DistortionSpec& spec) {
  require(j.nx() == spec.rows() && j.ny() == spec.cols(),
          "expected_distortion: shape mismatch");
  double e = 0;
  for (std::size_t x = 0; x < j.nx(); ++x)
    for (std::size_t y = 0; y < j.ny(); ++y) e += j(x, y) * spec(x, y);
  return e;
}

double expected_distortion(const Joint3& j, const DistortionSpec& spec) {
  return expected_distortion(j.marginal_xv(), spec);
}

}  // namespace secexp
