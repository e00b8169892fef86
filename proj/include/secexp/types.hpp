#pragma once

#include "secexp/rational.hpp"
#include "secexp/simplex.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace secexp {

// Sequences over {0..k-1}. Codes are base-k integers, position 0 most significant.
using Seq = std::vector<int>;

std::uint64_t encode_seq(const Seq& s, std::size_t k);
Seq decode_seq(std::uint64_t code, int n, std::size_t k);

constexpr double kEnumGuard = 1e7;

class TypeVec {
 public:
  TypeVec() = default;
  explicit TypeVec(std::vector<int> counts);

  const std::vector<int>& counts() const { return c_; }
  int n() const { return n_; }
  std::size_t size() const { return c_.size(); }
  int operator[](std::size_t i) const { return c_[i]; }
  Dist dist() const;

  bool operator==(const TypeVec& o) const { return c_ == o.c_; }
  bool operator<(const TypeVec& o) const { return c_ < o.c_; }

 private:
  std::vector<int> c_;
  int n_ = 0;
};

TypeVec type_of(const Seq& s, std::size_t k);

// Count table over X x Y or X x Y x V, row-major.
class JointTypeVec {
 public:
  JointTypeVec() = default;
  JointTypeVec(std::vector<std::size_t> dims, std::vector<int> counts);

  const std::vector<std::size_t>& dims() const { return dims_; }
  const std::vector<int>& counts() const { return c_; }
  int n() const { return n_; }
  int operator()(std::size_t x, std::size_t y) const { return c_[x * dims_[1] + y]; }
  int operator()(std::size_t x, std::size_t y, std::size_t v) const {
    return c_[(x * dims_[1] + y) * dims_[2] + v];
  }
  // Marginal count vector along one axis.
  TypeVec marginal(std::size_t axis) const;
  // X x Y marginal of a three-way table.
  JointTypeVec marginal_xy() const;
  Joint2 joint2() const;
  Joint3 joint3() const;

  bool operator==(const JointTypeVec& o) const { return dims_ == o.dims_ && c_ == o.c_; }
  bool operator<(const JointTypeVec& o) const {
    return dims_ != o.dims_ ? dims_ < o.dims_ : c_ < o.c_;
  }

 private:
  std::vector<std::size_t> dims_;
  std::vector<int> c_;
  int n_ = 0;
};

JointTypeVec joint_type_of(const Seq& x, const Seq& y, std::size_t nx, std::size_t ny);

// Distortion entries and level scaled to integers by the common denominator,
// so that sum d(x_i, y_i) <= n D is an integer comparison.
struct ScaledCosts {
  std::size_t cols = 0;
  std::vector<long long> cost;
  long long level = 0;
  long long at(std::size_t x, std::size_t y) const { return cost[x * cols + y]; }
};
ScaledCosts scaled_costs(const DistortionSpec& spec, int n);

// Mutual information and I(X;V|Y) of count tables, in bits.
double type_mutual_information(const JointTypeVec& jt);
double type_conditional_mi(const JointTypeVec& jt3);

std::vector<TypeVec> enum_types(int n, std::size_t k);
BigInt type_class_size(const TypeVec& t);

std::vector<JointTypeVec> joint_types_given_marginal_x(const TypeVec& q, std::size_t ysize,
                                                       const DistortionSpec& spec_d);
std::vector<JointTypeVec> joint_types_given_marginal_y(const TypeVec& qy, std::size_t xsize,
                                                       const DistortionSpec& spec_d);

// Minimizer of I(X;V|Y) over integer extensions with E[d_e] <= D_e.
JointTypeVec pstar_n(const JointTypeVec& jt, const DistortionSpec& spec_e);

struct TypeOptimum {
  JointTypeVec joint;      // X x Y
  JointTypeVec extension;  // pstar_n of joint
  double value = 0;        // objective maximized
  double pstar_value = 0;  // I(X;V|Y) of the extension
  double crd_value = 0;    // conditional_rd of the joint (qstar_rate only)
};

// Max over joint types with marginal q and E[d] <= D of the pstar_n value.
TypeOptimum qstar(const TypeVec& q, const DistortionSpec& spec_d, const DistortionSpec& spec_e);
// Max of conditional_rd over the same set intersected with I(X;Y) <= Rprime.
TypeOptimum qstar_rate(const TypeVec& q, double Rprime, const DistortionSpec& spec_d,
                       const DistortionSpec& spec_e);

// Calls fn for every sequence of the type, in increasing code order.
void for_each_sequence(const TypeVec& t, const std::function<void(const Seq&)>& fn);
// Calls fn for every output sequence s with: at positions where given == b,
// s has symbol counts counts[b]. Order is deterministic.
void for_each_conditional(const Seq& given, const std::vector<std::vector<int>>& counts,
                          std::size_t out_size, const std::function<void(const Seq&)>& fn);
// X sequences forming joint type jt with y.
void for_each_x_given_y(const JointTypeVec& jt, const Seq& y,
                        const std::function<void(const Seq&)>& fn);

struct CoverCode {
  std::vector<Seq> codewords;
  JointTypeVec joint_type;
  // x code -> indices of codewords y with (x, y) of the joint type, ascending.
  std::map<std::uint64_t, std::vector<int>> cover_index;
  double log2_size_bound = 0;  // |X||Y| log2(n+1) + n I(X;Y)
};

CoverCode greedy_cover(const JointTypeVec& jt);

struct KeyedCodebookOptions {
  // Keep books that still show event E after all retries instead of throwing.
  bool allow_persistent = false;
  int max_retries = 32;
};

struct KeyedCodebooks {
  JointTypeVec joint_type;
  std::vector<CoverCode> books;
  double epsilon = 0;
  int codebook_size = 0;  // N
  std::vector<bool> event_E_flags;
  std::vector<int> retries;
  std::optional<bool> event_Etilde_flag;  // filled by the adversary evaluation
};

// N = floor(2^{n(I+eps)}), raised to ceil(2^{n(I+2eps/3)}) when no integer
// lies between, clipped to |T_{Q_Y}|.
int keyed_codebook_size(const JointTypeVec& jt, double epsilon);

// 2^{n r_disc} books of N uniform draws from T_{Q_Y}.
KeyedCodebooks keyed_codebooks(const JointTypeVec& jt, double r_disc, double epsilon,
                               std::uint64_t seed, const KeyedCodebookOptions& opt = {});

struct RatioCheck {
  Rational ratio;
  double bound = 0;
  bool holds = false;
};

// |T_{V|XY}(x,y)| / |T_{V|Y}(y)| against (n+1)^{-|X||Y||V|} 2^{-n I(X;V|Y)}.
RatioCheck conditional_ratio_bound_check(const JointTypeVec& jt3, const Seq& x, const Seq& y);

std::vector<TypeVec> low_prob_types(const Dist& p, int n, double alpha, double delta);

bool ball_membership(const Seq& x, const Seq& v, const DistortionSpec& spec_e);

}  // namespace secexp
