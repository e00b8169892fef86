#pragma once

#include "secexp/rd.hpp"
#include "secexp/simplex.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace secexp {

struct SearchOptions {
  // Channel search (worst-case side information).
  int random_starts = 16;
  int refine_starts = 3;         // starts carried from the coarse to the fine phase
  double initial_step = 0.25;
  double coarse_min_step = 1e-2;
  double min_step = 1e-6;
  double rel_improvement = 1e-7;
  // Search over Q.
  double q_grid_step = 1e-3;     // binary alphabets
  double q_coarse_step = 1e-2;
  int q_random_starts = 8;       // larger alphabets
  double q_min_step = 1e-4;
  // Golden-section polish on binary alphabets stops at this bracket width;
  // narrower brackets only resolve kinks of the outer objective.
  double q_polish_tol = 1e-6;
  std::uint64_t seed = 1;
  RDOptions rd;
};

struct BlurValue {
  double value = 0;
  Channel argmax_channel;  // P_{Y|X}
  CondRDResult inner;
  int starts_used = 0;
};

struct ExponentResult {
  double value = 0;
  Dist argmin_q;
  std::string branch;
  std::map<std::string, double> diagnostics;
};

// max over P_{Y|X} with E[d] <= D of the conditional rate-distortion value.
BlurValue r_blur(const Dist& p, const DistortionSpec& spec_d, const DistortionSpec& spec_e,
                 const SearchOptions& opt = {});
// Same with the extra constraint I(X;Y) <= R. `warm_start` joins the starts.
BlurValue r_blur_rate(const Dist& p, double R, const DistortionSpec& spec_d,
                      const DistortionSpec& spec_e, const SearchOptions& opt = {},
                      const Channel* warm_start = nullptr);

ExponentResult exponent_nokey(const Dist& p, const DistortionSpec& spec_d,
                              const DistortionSpec& spec_e, const SearchOptions& opt = {});
ExponentResult exponent_perfect(const Dist& p, const DistortionSpec& spec_e,
                                const SearchOptions& opt = {});
// alpha may be +inf (no constraint on D(Q||P)).
ExponentResult exponent_key(const Dist& p, const DistortionSpec& spec_d,
                            const DistortionSpec& spec_e, double R, double r, double alpha,
                            const SearchOptions& opt = {});
double min_key_rate(const Dist& p, const DistortionSpec& spec_d, const DistortionSpec& spec_e,
                    double R, double alpha, const SearchOptions& opt = {});
double compute_R_alpha(const Dist& p, const DistortionSpec& spec_d, double alpha,
                       const SearchOptions& opt = {});

// Binary source, Hamming distortions, D_e <= D < 1/2.
double closed_form_binary(double q, double D, double De);

struct RefinabilityReport {
  double value = 0;          // worst-case side-information value found
  double re = 0;             // R_e(q, D_e)
  double r = 0;              // R(q, D)
  bool refinable = false;    // value == re - r within 2e-3
  double rd_channel_value = 0;
  bool rd_channel_near_optimal = false;
  // I(X;Y|V) under q x (RD channel) x (optimal V channel); zero for a
  // degraded chain X - V - Y.
  double markov_defect = 0;
};

RefinabilityReport successive_refinability_probe(const Dist& q, const DistortionSpec& spec_d,
                                                 const DistortionSpec& spec_e,
                                                 const SearchOptions& opt = {});

}  // namespace secexp
