#pragma once

#include <span>
#include <vector>

#include <gmpxx.h>

namespace seigen {

inline constexpr int kDefaultFractionBits = 32;
inline constexpr int kMinFractionBits = 16;

// Maps signed reals into Z_n as round(x * 2^f) mod n. Values in the upper
// half of the ring decode as negatives. `scalar_bound` is the largest
// integer any ciphertext may be multiplied by homomorphically; the
// constructor rejects parameters where such a product could wrap.
class FixedPointCodec {
 public:
  FixedPointCodec(int fraction_bits, mpz_class modulus, double max_magnitude,
                  mpz_class scalar_bound = 1);

  int fraction_bits() const noexcept { return fraction_bits_; }
  const mpz_class& modulus() const noexcept { return modulus_; }
  double max_magnitude() const noexcept { return max_magnitude_; }
  const mpz_class& scalar_bound() const noexcept { return scalar_bound_; }
  // Largest per-element round-trip error, 2^(-f-1).
  double resolution() const noexcept;

  mpz_class encode(double x) const;
  double decode(const mpz_class& m, const mpz_class& applied_scale = 1) const;

  std::vector<mpz_class> encode_vector(std::span<const double> v) const;
  std::vector<double> decode_vector(std::span<const mpz_class> v,
                                    const mpz_class& applied_scale = 1) const;

 private:
  int fraction_bits_;
  mpz_class modulus_;
  mpz_class half_modulus_;
  double max_magnitude_;
  mpz_class scalar_bound_;
};

}  // namespace seigen
