#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace stagroute {

using NodeId = int;
using ArcId = int;
using TripId = int;

// Global absolute tolerance for time comparisons, in seconds. Every module
// that compares departure/arrival instants uses this same constant so that
// conflict predicates stay consistent across the engine.
inline constexpr double kTimeEps = 1e-9;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid parameters or malformed requests. CLI exit code 2.
struct UsageError : Error {
  using Error::Error;
};

// File or schema problems. CLI exit code 3.
struct IoError : Error {
  using Error::Error;
};

// Enumeration / propagation budget exceeded. CLI exit code 4.
struct BudgetError : Error {
  using Error::Error;
};

// Requested endpoints are not connected.
struct NoPathError : Error {
  using Error::Error;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Small deterministic PRNG (splitmix64 sequence). Self-contained so results
// do not depend on standard-library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  double exponential(double rate) { return -std::log1p(-u01()) / rate; }

  // Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  int below_int(int n) { return static_cast<int>(below(static_cast<std::uint64_t>(n))); }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::uint64_t state_;
};

// Derives an independent substream for (seed, index). Used wherever per-item
// randomness must stay stable when more items are appended.
inline Rng substream(std::uint64_t seed, std::uint64_t index) {
  return Rng(splitmix64(splitmix64(seed) + index));
}

}  // namespace stagroute
