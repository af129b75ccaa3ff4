#pragma once

// Reproducible random streams. Each (seed, stream) pair deterministically
// yields an independent engine, so replications can run on any number of
// threads and still produce bit-identical results when reduced in index
// order. Samplers avoid std::*_distribution on purpose: their outputs are
// implementation-defined, these are pinned.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace alohar {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Engine for replication `stream` of master seed `seed`.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed;
  std::uint64_t a = splitmix64(x);
  x ^= (stream + 1) * 0x9E3779B97F4A7C15ULL;
  std::uint64_t b = splitmix64(x);
  return std::mt19937_64(a ^ (b + 0x632BE59BD9B4E019ULL));
}

// Uniform on (0,1]; never 0, so logarithms are safe.
inline double runif(std::mt19937_64& g) {
  return static_cast<double>((g() >> 11) + 1) * 0x1.0p-53;
}

inline double rexp(std::mt19937_64& g, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("rexp: rate must be > 0");
  return -std::log(runif(g)) / rate;
}

// Unit-mean exponential fading mark.
inline double rfade(std::mt19937_64& g) { return -std::log(runif(g)); }

inline bool rbernoulli(std::mt19937_64& g, double p) { return runif(g) <= p; }

// Poisson count by the product method, chunked so the per-chunk mean stays
// small enough that exp(-mean) does not underflow.
inline long rpoisson(std::mt19937_64& g, double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("rpoisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  long total = 0;
  double left = mean;
  while (left > 0.0) {
    const double m = left > 40.0 ? 40.0 : left;
    left -= m;
    const double limit = std::exp(-m);
    double prod = runif(g);
    long k = 0;
    while (prod > limit) {
      prod *= runif(g);
      ++k;
    }
    total += k;
  }
  return total;
}

}  // namespace alohar
