#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "seigen/random.hpp"

namespace seigen::paillier {

inline constexpr unsigned kDefaultKeyBits = 1024;
inline constexpr unsigned kMinKeyBits = 256;
inline constexpr int kPrimalityRounds = 64;

using KeyId = std::uint64_t;

struct PublicKey {
  mpz_class n;
  mpz_class n_squared;
  mpz_class g;  // always n + 1
  KeyId key_id = 0;

  // Rebuilds the derived fields from n.
  static PublicKey from_modulus(const mpz_class& n);
  bool operator==(const PublicKey&) const = default;
};

struct PrivateKey {
  mpz_class lambda;
  mpz_class mu;
  KeyId key_id = 0;
  bool operator==(const PrivateKey&) const = default;
};

struct Ciphertext {
  mpz_class value;
  KeyId key_id = 0;
  bool operator==(const Ciphertext&) const = default;
};

struct KeyPair {
  PublicKey pub;
  PrivateKey priv;
  bool operator==(const KeyPair&) const = default;
};

// Generates a key pair whose modulus has exactly `bits` bits.
// Throws DomainError for odd or too-small sizes, GenerationError if no
// suitable primes are found within the retry budget.
KeyPair keygen(unsigned bits, RandomSource& rng);

Ciphertext encrypt(const PublicKey& pk, const mpz_class& m, RandomSource& rng);
mpz_class decrypt(const PrivateKey& sk, const PublicKey& pk, const Ciphertext& c);

// E[a] * E[b] = E[a + b mod n]
Ciphertext add_encrypted(const PublicKey& pk, const Ciphertext& c1, const Ciphertext& c2);
// E[m]^s = E[s * m mod n]
Ciphertext scalar_mul(const PublicKey& pk, const Ciphertext& c, const mpz_class& s);

// Key files are a sequence of [u32 length][big-endian magnitude] integers:
// n for a public key; n, lambda, mu for a key pair.
std::vector<std::uint8_t> serialize_public_key(const PublicKey& pk);
std::vector<std::uint8_t> serialize_key_pair(const KeyPair& keys);
PublicKey deserialize_public_key(std::span<const std::uint8_t> bytes);
KeyPair deserialize_key_pair(std::span<const std::uint8_t> bytes);

}  // namespace seigen::paillier
