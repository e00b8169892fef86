#pragma once

#include "secexp/rational.hpp"

#include <cstddef>
#include <limits>
#include <vector>

namespace secexp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kSumTol = 1e-12;

// Probability vector on {0,...,k-1}. Validated on construction; never
// renormalized behind the caller's back.
class Dist {
 public:
  Dist() = default;
  explicit Dist(std::vector<double> probs);

  static Dist normalize(std::vector<double> weights);
  static Dist uniform(std::size_t k);
  static Dist point(std::size_t k, std::size_t i);
  // (1 - p1, p1): Ber(p1) puts mass p1 on symbol 1.
  static Dist bernoulli(double p1);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& probs() const { return p_; }
  bool full_support() const;

  friend bool operator==(const Dist&, const Dist&) = default;

 private:
  std::vector<double> p_;
};

// Conditional law: one Dist per input symbol, all over the same output alphabet.
class Channel {
 public:
  Channel() = default;
  explicit Channel(std::vector<Dist> rows);
  static Channel from_table(std::size_t inputs, std::size_t outputs,
                            const std::vector<double>& table);

  std::size_t inputs() const { return rows_.size(); }
  std::size_t outputs() const { return rows_.empty() ? 0 : rows_[0].size(); }
  const Dist& row(std::size_t x) const { return rows_[x]; }
  double operator()(std::size_t x, std::size_t y) const { return rows_[x][y]; }
  // Row-major copy.
  std::vector<double> table() const;

 private:
  std::vector<Dist> rows_;
};

class Joint2 {
 public:
  Joint2() = default;
  Joint2(std::size_t nx, std::size_t ny, std::vector<double> table);
  static Joint2 product(const Dist& px, const Dist& py);
  static Joint2 compose(const Dist& px, const Channel& w);

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  double operator()(std::size_t x, std::size_t y) const { return t_[x * ny_ + y]; }
  const std::vector<double>& table() const { return t_; }

  Dist marginal_x() const;
  Dist marginal_y() const;
  // P_{Y|X}; rows with zero mass become uniform.
  Channel channel_y_given_x() const;

 private:
  std::size_t nx_ = 0, ny_ = 0;
  std::vector<double> t_;
};

class Joint3 {
 public:
  Joint3() = default;
  Joint3(std::size_t nx, std::size_t ny, std::size_t nv, std::vector<double> table);
  // P_XY composed with P_{V|XY}; the channel's input index is x*ny + y.
  static Joint3 compose(const Joint2& xy, const Channel& v_given_xy);

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t nv() const { return nv_; }
  double operator()(std::size_t x, std::size_t y, std::size_t v) const {
    return t_[(x * ny_ + y) * nv_ + v];
  }
  const std::vector<double>& table() const { return t_; }

  Joint2 marginal_xy() const;
  Joint2 marginal_xv() const;
  Joint2 marginal_yv() const;

 private:
  std::size_t nx_ = 0, ny_ = 0, nv_ = 0;
  std::vector<double> t_;
};

// Per-letter distortion matrix plus a level. Entries and level are also kept
// as exact rationals for type-level comparisons.
class DistortionSpec {
 public:
  DistortionSpec() = default;
  DistortionSpec(std::size_t rows, std::size_t cols, std::vector<double> matrix,
                 double level);
  DistortionSpec(std::size_t rows, std::size_t cols, std::vector<Rational> matrix,
                 Rational level);

  static DistortionSpec hamming(std::size_t k, double level);
  static DistortionSpec hamming(std::size_t k, const Rational& level);
  static DistortionSpec constant(std::size_t rows, std::size_t cols, double c,
                                 double level);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t x, std::size_t y) const { return m_[x * cols_ + y]; }
  double level() const { return level_; }
  const Rational& exact(std::size_t x, std::size_t y) const { return mq_[x * cols_ + y]; }
  const Rational& exact_level() const { return level_q_; }
  const std::vector<double>& matrix() const { return m_; }

  double d_min() const;
  double d_max() const;
  bool is_hamming() const;

  DistortionSpec with_level(double level) const;
  DistortionSpec with_level(const Rational& level) const;

 private:
  void check() const;
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> m_;
  std::vector<Rational> mq_;
  double level_ = 0;
  Rational level_q_;
};

double entropy(const Dist& p);
double binary_entropy(double q);
double kl_divergence(const Dist& q, const Dist& p);
double mutual_information(const Joint2& j);
double conditional_entropy_x_given_y(const Joint2& j);
double conditional_mutual_information(const Joint3& j);
double expected_distortion(const Joint2& j, const DistortionSpec& spec);
double expected_distortion(const Joint3& j, const DistortionSpec& spec);

// Raw-table kernels shared with the solvers (no validation).
double entropy_raw(const double* p, std::size_t k);
double mutual_information_raw(const double* t, std::size_t nx, std::size_t ny);

}  // namespace secexp
