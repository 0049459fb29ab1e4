#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <gmpxx.h>

namespace seigen {

// Unsigned big-endian magnitude without leading zero bytes; zero is empty.
std::vector<std::uint8_t> to_bytes_be(const mpz_class& value);
mpz_class from_bytes_be(std::span<const std::uint8_t> bytes);

}  // namespace seigen
