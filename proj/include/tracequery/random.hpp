#pragma once

// Portable draws from std::mt19937_64. The standard distributions are
// implementation-defined, so seeded runs would differ across standard
// libraries; these helpers do not.

#include <cstdint>
#include <random>

namespace tracequery {

using Rng = std::mt19937_64;

// Uniform integer in [0, n), by rejection.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Uniform double in [0, 1).
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform_real(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

inline bool coin(Rng& rng, double p_true = 0.5) { return uniform01(rng) < p_true; }

// Fisher-Yates shuffle driven by uniform_below.
template <class Vec>
void shuffle(Vec& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    using std::swap;
    swap(v[i - 1], v[j]);
  }
}

}  // namespace tracequery
