#pragma once

#include "secexp/simplex.hpp"

#include <utility>
#include <vector>

namespace secexp {

struct RDOptions {
  // Stop the inner fixed point once the Lagrangian suboptimality bound
  // (in bits) drops below this.
  double gap_tol = 1e-10;
  int max_iterations = 5000;
  // Per-slice cap while searching for the slope; the final solve at the
  // chosen slope uses max_iterations. Slices near zero rate converge slowly.
  int bracket_iterations = 500;
  double distortion_tol = 1e-7;
  double bracket_tol = 1e-10;
};

struct RDResult {
  double value = 0;
  Channel argmin_channel;       // P_{Y|X}
  double lagrange_slope = 0;    // bits per unit distortion; +inf at the corner
  double achieved_distortion = 0;
  int iterations = 0;
  bool converged = true;
};

struct CondRDResult {
  double value = 0;
  Channel argmin_channel;       // P_{V|XY}, input index x*|Y| + y
  std::vector<double> per_y_slopes;
  double achieved_distortion = 0;
  int iterations = 0;
  bool converged = true;
};

// (d_min, d_max): largest row minimum and largest entry.
std::pair<double, double> min_distortion_levels(const DistortionSpec& spec);

RDResult rd_function(const Dist& p, const DistortionSpec& spec,
                     const RDOptions& opt = {});
double distortion_rate(const Dist& p, const DistortionSpec& spec, double R,
                       const RDOptions& opt = {});
CondRDResult conditional_rd(const Joint2& j, const DistortionSpec& spec_e,
                            const RDOptions& opt = {});

namespace detail {

// min Σ_y w_y I(X;V | Y=y) s.t. Σ_y w_y E[d | Y=y] <= target, where slice y
// has source src[y*nx .. y*nx+nx). One slope shared by all slices.
struct SlicedProblem {
  std::size_t nx = 0, nv = 0, ny = 0;
  std::vector<double> weight;   // ny
  std::vector<double> src;      // ny*nx, each slice sums to 1 when weight > 0
  const double* d = nullptr;    // nx*nv
};

struct SlicedSolution {
  double value = 0;
  double distortion = 0;
  double slope = 0;
  int iterations = 0;
  bool converged = true;
  std::vector<double> channel;  // ny*nx*nv, filled only on request
};

SlicedSolution solve_sliced(const SlicedProblem& pr, double target, bool want_channel,
                            const RDOptions& opt);
// Minimal achievable distortion for this problem (each x on its row minimum).
double min_achievable_distortion(const SlicedProblem& pr);

// Cheap value-only entry points for the outer optimizers.
double rd_value(const double* p, std::size_t nx, const DistortionSpec& spec,
                const RDOptions& opt = {});
double conditional_rd_value(const double* joint, std::size_t nx, std::size_t ny,
                            const DistortionSpec& spec_e, const RDOptions& opt = {});

}  // namespace detail

}  // namespace secexp
