#include "seigen/random.hpp"

#include <algorithm>
#include <stdexcept>

namespace seigen {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x51ed270b7a3fULL));
}

double RandomSource::uniform(double lo, double hi) {
  // 53 random mantissa bits, independent of the library's distribution impl.
  const double unit = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

std::uint64_t RandomSource::uniform_int(std::uint64_t lo, std::uint64_t hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const std::uint64_t span = hi - lo;
  if (span == ~std::uint64_t{0}) return next_u64();
  const std::uint64_t range = span + 1;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % range);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return lo + x % range;
}

double RandomSource::normal(double sigma) {
  std::normal_distribution<double> dist(0.0, sigma);
  return dist(engine_);
}

bool RandomSource::bernoulli(double p) { return uniform(0.0, 1.0) < p; }

mpz_class RandomSource::random_bits(unsigned bits) {
  mpz_class out = 0;
  unsigned produced = 0;
  while (produced < bits) {
    const unsigned take = std::min(64u, bits - produced);
    std::uint64_t chunk = next_u64();
    if (take < 64) chunk &= (std::uint64_t{1} << take) - 1;
    mpz_class part;
    mpz_import(part.get_mpz_t(), 1, 1, sizeof(chunk), 0, 0, &chunk);
    out = (out << take) | part;
    produced += take;
  }
  return out;
}

mpz_class RandomSource::uniform_below(const mpz_class& bound) {
  if (bound <= 0) throw std::invalid_argument("uniform_below: bound must be positive");
  const unsigned bits = static_cast<unsigned>(mpz_sizeinbase(bound.get_mpz_t(), 2));
  mpz_class x;
  do {
    x = random_bits(bits);
  } while (x >= bound);
  return x;
}

}  // namespace seigen
