#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace secexp {

// SplitMix64 finalizer; used to derive independent sub-seeds from
// (seed, stream, counter) so that per-start and per-book streams do not
// depend on evaluation order.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t counter = 0) {
  return mix64(mix64(mix64(seed) ^ stream) ^ (counter * 0xd1b54a32d192ed03ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform on (0,1); 53 random bits, never exactly 0.
  double uniform() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Rejection keeps it unbiased and portable.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t lim = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do v = eng_(); while (v >= lim);
    return v % n;
  }

  // Flat Dirichlet(1,...,1) draw via normalized exponentials.
  std::vector<double> dirichlet(std::size_t k) {
    std::vector<double> w(k);
    double s = 0;
    for (auto& x : w) s += (x = -std::log(uniform()));
    for (auto& x : w) x /= s;
    return w;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace secexp
