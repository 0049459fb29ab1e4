#include "seigen/fixed_point.hpp"

#include <cmath>
#include <string>

#include "seigen/errors.hpp"

namespace seigen {

FixedPointCodec::FixedPointCodec(int fraction_bits, mpz_class modulus, double max_magnitude,
                                 mpz_class scalar_bound)
    : fraction_bits_(fraction_bits),
      modulus_(std::move(modulus)),
      half_modulus_(modulus_ / 2),
      max_magnitude_(max_magnitude),
      scalar_bound_(std::move(scalar_bound)) {
  if (fraction_bits_ < kMinFractionBits)
    throw DomainError("fraction bits must be at least " + std::to_string(kMinFractionBits));
  if (!(max_magnitude_ > 0.0) || !std::isfinite(max_magnitude_))
    throw DomainError("max magnitude must be positive and finite");
  if (scalar_bound_ < 1) throw DomainError("scalar bound must be at least 1");
  // 2^f * T * R_max * 2 < n
  mpz_class bound(std::ceil(max_magnitude_));
  bound <<= fraction_bits_ + 1;
  bound *= scalar_bound_;
  if (bound >= modulus_)
    throw DomainError("codec range exceeds plaintext modulus: 2^f * T * R * 2 >= n");
}

double FixedPointCodec::resolution() const noexcept {
  return std::ldexp(1.0, -fraction_bits_ - 1);
}

mpz_class FixedPointCodec::encode(double x) const {
  if (!std::isfinite(x) || std::fabs(x) > max_magnitude_)
    throw OverflowError("value exceeds codec magnitude bound", 0);
  mpz_class m(std::round(std::ldexp(x, fraction_bits_)));
  if (m < 0) m += modulus_;
  return m;
}

double FixedPointCodec::decode(const mpz_class& m, const mpz_class& applied_scale) const {
  mpz_class signed_value = m;
  if (signed_value > half_modulus_) signed_value -= modulus_;
  // Divide exactly first so large scaled values keep full precision.
  mpz_class q;
  mpz_class r;
  mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), signed_value.get_mpz_t(),
              applied_scale.get_mpz_t());
  const double value = q.get_d() + r.get_d() / applied_scale.get_d();
  return std::ldexp(value, -fraction_bits_);
}

std::vector<mpz_class> FixedPointCodec::encode_vector(std::span<const double> v) const {
  std::vector<mpz_class> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || std::fabs(v[i]) > max_magnitude_)
      throw OverflowError("element " + std::to_string(i) + " exceeds codec magnitude bound", i);
    out.push_back(encode(v[i]));
  }
  return out;
}

std::vector<double> FixedPointCodec::decode_vector(std::span<const mpz_class> v,
                                                   const mpz_class& applied_scale) const {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& m : v) out.push_back(decode(m, applied_scale));
  return out;
}

}  // namespace seigen
