#pragma once

// Reference computations that share no code path with the solvers: grids,
// exhaustive enumeration and textbook formulas. Slow by design.

#include "secexp/rational.hpp"
#include "secexp/rng.hpp"
#include "secexp/simplex.hpp"

#include <functional>
#include <vector>

namespace secexp::oracle {

struct BinaryCrdInstance {
  Joint2 joint;
  DistortionSpec spec_e;
};

BinaryCrdInstance random_binary_crd_instance(Rng& rng);

// min I(X;V|Y) s.t. E[d_e] <= D_e over all P_{V|XY} for |X|=|Y|=|V|=2, by an
// exhaustive 0.005 grid on the four free parameters (separable per y, joined
// through the distortion budget) followed by zoomed local grids.
double brute_conditional_rd_binary(const Joint2& j, const DistortionSpec& spec_e);

// Binary source / Hamming: [h(p1) - h(D)]^+ style closed form.
double binary_rd_hamming(double p1, double D);
// Three-branch binary Hamming value of the worst-case side information.
double binary_blur_hamming(double q, double D, double De);

// Minimum of f over a uniform grid on [lo, hi] (endpoints included).
std::pair<double, double> grid_min_1d(const std::function<double(double)>& f, double lo,
                                      double hi, double step);

// Exact Pr(Bin(n, p) <= k).
Rational binomial_cdf(int n, int k, const Rational& p);

// Minimum number of columns covering every row of a 0/1 matrix, by subset
// enumeration (columns <= 20).
int exhaustive_min_cover(const std::vector<std::vector<bool>>& covers);

// All count tables of n into k cells (any order), by plain recursion.
std::vector<std::vector<int>> all_count_tables(int n, int k);

}  // namespace secexp::oracle
