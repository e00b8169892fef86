#pragma once

#include "secexp/rational.hpp"
#include "secexp/simplex.hpp"
#include "secexp/types.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace secexp {

// Exact-evaluation limits.
constexpr double kPairGuard = 3e8;      // (x, v) ball tests in one MAP evaluation
constexpr double kVGuard = 1e6;         // |V|^n outside the binary Hamming fast path
constexpr double kSequenceGuard = 1e6;  // |X|^n for encoder tables

// Source letters as exact rationals (shortest fractions matching the doubles).
std::vector<Rational> exact_source(const Dist& p);

struct TypeCode {
  TypeOptimum choice;
  CoverCode code;
};

// Deterministic encoder x^n -> y^n plus what it was built from.
struct BlurSystem {
  Dist source;
  std::vector<Rational> source_exact;
  int n = 0;
  DistortionSpec spec_d, spec_e;
  std::size_t nx = 0, ny = 0;
  std::map<TypeVec, TypeCode> per_type_code;  // empty for the constant encoder
  std::vector<std::uint64_t> encoder;         // indexed by x code, holds y code
  std::string kind;                           // "blur" or "constant"
};

// Per type: qstar joint type, greedy cover, first covering codeword.
BlurSystem build_blur_system(const Dist& p, int n, const DistortionSpec& spec_d,
                             const DistortionSpec& spec_e);
// Every x^n mapped to the constant sequence (y_symbol, ..., y_symbol).
BlurSystem make_constant_blur_system(const Dist& p, int n, const DistortionSpec& spec_d,
                                     const DistortionSpec& spec_e, int y_symbol = 0);
// Exact check of d(x^n, f(x^n)) <= D for every x^n; returns the number of violations.
long encoder_violations(const BlurSystem& s);

struct MessageBound {
  int type_id = 0;
  int index = 0;
  Rational conditional_success;  // max_v Pr(d_e(X^n, v^n) <= D_e | M = m)
  double bound = 0;
  bool holds = true;
};

struct AdversaryReport {
  std::string strategy;
  int n = 0;
  std::optional<Rational> exact;  // present for exact evaluations
  double success = 0;
  bool monte_carlo = false;
  double ci_radius = 0;  // Wilson 95% half-width when sampled
  long samples = 0;
  double empirical_exponent = 0;  // -(1/n) log2 success
  std::map<std::vector<int>, double> per_type;  // x type -> contribution to success
  std::map<std::string, double> diagnostics;
  std::vector<MessageBound> message_bounds;  // keyed MAP only
};

// Observation model for the exact MAP core: for each message, the list of
// (x code, Pr(X^n = x, M = m)).
struct ObservationModel {
  int n = 0;
  std::size_t nx = 0;
  std::vector<std::vector<std::pair<std::uint64_t, Rational>>> messages;
};

struct MapOutcome {
  Rational total;
  std::vector<Rational> per_message;       // max_v Pr(X in B(v), M = m)
  std::vector<std::uint64_t> argmax_v;     // lowest v code attaining it
};

// Exact sum over messages of max_v sum_{x in B(v)} weight.
MapOutcome exact_map(const ObservationModel& model, const DistortionSpec& spec_e);

AdversaryReport map_adversary(const BlurSystem& s);
AdversaryReport genie_map_adversary(const BlurSystem& s);

struct TwoStageOptions {
  // Polynomial exponent c in the per-pair check (n+1)^{-c} 2^{-n I}; 0 means
  // |X||Y|(|V|+1).
  int bound_exponent = 0;
  std::uint64_t seed = 1;
  long mc_samples = 200000;
  double exact_budget = kPairGuard;
};

AdversaryReport two_stage_adversary(const BlurSystem& s, const TwoStageOptions& opt = {});

struct KeyedSystem {
  Dist source;
  std::vector<Rational> source_exact;
  int n = 0;
  DistortionSpec spec_d, spec_e;
  std::size_t nx = 0, ny = 0;
  double R = 0, r_disc = 0, alpha = 0, delta = 0, epsilon = 0.5;
  int num_keys = 1;
  std::vector<TypeVec> types;                   // type id t+1 <-> types[t]; id 0 is the dummy
  std::vector<KeyedCodebooks> books;            // parallel to types
  std::vector<TypeOptimum> choices;             // parallel to types
  std::vector<double> rprime;                   // rate cap used per type
  Rational dummy_mass;                          // Pr(type of X^n is not in `types`)
  int message_bits = 0;
  int type_bits = 0, index_bits = 0;
};

struct KeyedOptions {
  double epsilon = 0.5;
  // Cap on I(X;Y) for the code joint types; default is the largest value the
  // bit budget n R admits.
  std::optional<double> rprime;
  std::uint64_t seed = 1;
};

KeyedSystem build_keyed_system(const Dist& p, int n, const DistortionSpec& spec_d,
                               const DistortionSpec& spec_e, double R, double r_disc,
                               double alpha, double delta, const KeyedOptions& opt = {});
// Lower-level assembly from ready-made books; types without books send the
// dummy message. Checks the bit budget and, for finite alpha, the dummy mass.
KeyedSystem assemble_keyed_system(const Dist& p, int n, const DistortionSpec& spec_d,
                                  const DistortionSpec& spec_e, double R, double r_disc,
                                  double alpha, double delta,
                                  const std::map<TypeVec, KeyedCodebooks>& books);

// Message codec: (type id, codeword index); (0, 0) is the dummy message.
std::uint64_t encode_message(const KeyedSystem& s, int type_id, int index);
std::pair<int, int> decode_message(const KeyedSystem& s, std::uint64_t m);
// h(m, k): the reproduction sequence; the dummy message decodes to all zeros.
Seq keyed_decode(const KeyedSystem& s, int type_id, int index, int key);
// Pr(M = (type, i) | X^n = x, K = k): the type id of x and (index, probability) pairs.
struct EncoderLaw {
  int type_id = 0;
  std::vector<std::pair<int, Rational>> law;
};
EncoderLaw keyed_encoder_law(const KeyedSystem& s, const Seq& x, int key);

// Also fills message_bounds with the per-message guessing bound check.
AdversaryReport keyed_map_adversary(const KeyedSystem& s);
AdversaryReport key_guess_adversary(const KeyedSystem& s, std::uint64_t seed = 1);

AdversaryReport blind_adversary(const Dist& p, int n, const DistortionSpec& spec_e);

struct TrendRow {
  int n = 0;
  std::optional<Rational> exact;
  double success = 0;
  double exponent = 0;
  double theory = 0;
  double gap = 0;  // |exponent - theory|
};

struct Trend {
  std::vector<TrendRow> rows;
  bool exponent_increasing = true;
  bool gap_decreasing = true;
  bool below_theory = true;
};

Trend exponent_trend(const std::function<AdversaryReport(int)>& report_fn,
                     const std::vector<int>& n_list, double theory);

}  // namespace secexp
