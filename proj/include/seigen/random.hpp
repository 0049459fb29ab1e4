#pragma once

#include <cstdint>
#include <random>

#include <gmpxx.h>

namespace seigen {

// Mixes a base seed with a stream index so independent consumers
// (parties, arbitrator coins, noise, ...) never share a sequence.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Seeded source of all randomness in the library. Not thread-safe; each
// actor owns its own instance.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform real in [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer in [lo, hi], both inclusive.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
  double normal(double sigma);
  bool bernoulli(double p);

  // Uniform big integer with exactly `bits` random bits (may have leading zeros).
  mpz_class random_bits(unsigned bits);
  // Uniform big integer in [0, bound).
  mpz_class uniform_below(const mpz_class& bound);

 private:
  std::mt19937_64 engine_;
};

}  // namespace seigen
