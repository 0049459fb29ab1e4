#include "seigen/bigint.hpp"

#include <stdexcept>

namespace seigen {

std::vector<std::uint8_t> to_bytes_be(const mpz_class& value) {
  if (value < 0) throw std::invalid_argument("to_bytes_be: negative value");
  if (value == 0) return {};
  std::vector<std::uint8_t> out((mpz_sizeinbase(value.get_mpz_t(), 2) + 7) / 8);
  std::size_t written = 0;
  mpz_export(out.data(), &written, 1, 1, 1, 0, value.get_mpz_t());
  out.resize(written);
  return out;
}

mpz_class from_bytes_be(std::span<const std::uint8_t> bytes) {
  mpz_class out = 0;
  if (!bytes.empty()) mpz_import(out.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  return out;
}

}  // namespace seigen
