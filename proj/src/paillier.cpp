#include "seigen/paillier.hpp"

#include <string>

#include "seigen/bigint.hpp"
#include "seigen/errors.hpp"

namespace seigen::paillier {

namespace {

constexpr int kPrimeAttempts = 100000;
constexpr int kKeyAttempts = 64;

KeyId fingerprint(const mpz_class& n) {
  // FNV-1a over the modulus bytes.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : to_bytes_be(n)) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

mpz_class random_prime(unsigned bits, RandomSource& rng) {
  for (int attempt = 0; attempt < kPrimeAttempts; ++attempt) {
    mpz_class candidate = rng.random_bits(bits);
    // Top two bits set so the product of two such primes has 2*bits bits.
    mpz_setbit(candidate.get_mpz_t(), bits - 1);
    mpz_setbit(candidate.get_mpz_t(), bits - 2);
    mpz_setbit(candidate.get_mpz_t(), 0);
    if (mpz_probab_prime_p(candidate.get_mpz_t(), kPrimalityRounds) > 0) return candidate;
  }
  throw GenerationError("prime generation failed after " + std::to_string(kPrimeAttempts) +
                        " candidates");
}

mpz_class lfunc(const mpz_class& x, const mpz_class& n) { return (x - 1) / n; }

void require_key(const PublicKey& pk, KeyId id) {
  if (id != pk.key_id) throw KeyError("ciphertext key id does not match public key");
}

void append_int(std::vector<std::uint8_t>& out, const mpz_class& v) {
  const auto bytes = to_bytes_be(v);
  const auto len = static_cast<std::uint32_t>(bytes.size());
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(len >> shift));
  out.insert(out.end(), bytes.begin(), bytes.end());
}

std::vector<mpz_class> read_ints(std::span<const std::uint8_t> bytes, std::size_t expected) {
  std::vector<mpz_class> out;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    if (bytes.size() - pos < 4) throw ParseError("truncated key length", pos);
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len = (len << 8) | bytes[pos + i];
    pos += 4;
    if (bytes.size() - pos < len) throw ParseError("truncated key integer", pos);
    if (len > 0 && bytes[pos] == 0) throw ParseError("non-canonical leading zero", pos);
    out.push_back(from_bytes_be(bytes.subspan(pos, len)));
    pos += len;
  }
  if (out.size() != expected)
    throw ParseError("expected " + std::to_string(expected) + " key integers", pos);
  return out;
}

}  // namespace

PublicKey PublicKey::from_modulus(const mpz_class& n) {
  PublicKey pk;
  pk.n = n;
  pk.n_squared = n * n;
  pk.g = n + 1;
  pk.key_id = fingerprint(n);
  return pk;
}

KeyPair keygen(unsigned bits, RandomSource& rng) {
  if (bits < kMinKeyBits || bits % 2 != 0)
    throw DomainError("key size must be even and at least " + std::to_string(kMinKeyBits));
  const unsigned half = bits / 2;
  for (int attempt = 0; attempt < kKeyAttempts; ++attempt) {
    const mpz_class p = random_prime(half, rng);
    const mpz_class q = random_prime(half, rng);
    if (p == q) continue;
    const mpz_class n = p * q;
    const mpz_class phi = (p - 1) * (q - 1);
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), phi.get_mpz_t());
    if (g != 1) continue;

    KeyPair keys;
    keys.pub = PublicKey::from_modulus(n);
    mpz_lcm(keys.priv.lambda.get_mpz_t(), mpz_class(p - 1).get_mpz_t(),
            mpz_class(q - 1).get_mpz_t());
    mpz_class u;
    mpz_powm(u.get_mpz_t(), keys.pub.g.get_mpz_t(), keys.priv.lambda.get_mpz_t(),
             keys.pub.n_squared.get_mpz_t());
    const mpz_class l = lfunc(u, n);
    if (mpz_invert(keys.priv.mu.get_mpz_t(), l.get_mpz_t(), n.get_mpz_t()) == 0) continue;
    keys.priv.key_id = keys.pub.key_id;
    return keys;
  }
  throw GenerationError("key generation failed after bounded retries");
}

Ciphertext encrypt(const PublicKey& pk, const mpz_class& m, RandomSource& rng) {
  if (m < 0 || m >= pk.n) throw DomainError("plaintext outside [0, n)");
  mpz_class r;
  mpz_class gcd;
  do {
    r = rng.uniform_below(pk.n - 1) + 1;
    mpz_gcd(gcd.get_mpz_t(), r.get_mpz_t(), pk.n.get_mpz_t());
  } while (gcd != 1);
  // g = n + 1, so g^m = 1 + m*n (mod n^2).
  mpz_class rn;
  mpz_powm(rn.get_mpz_t(), r.get_mpz_t(), pk.n.get_mpz_t(), pk.n_squared.get_mpz_t());
  mpz_class c = (1 + m * pk.n) % pk.n_squared;
  c = (c * rn) % pk.n_squared;
  return Ciphertext{std::move(c), pk.key_id};
}

mpz_class decrypt(const PrivateKey& sk, const PublicKey& pk, const Ciphertext& c) {
  if (sk.key_id != pk.key_id || c.key_id != pk.key_id)
    throw KeyError("ciphertext key id does not match key pair");
  if (c.value < 0 || c.value >= pk.n_squared) throw CorruptionError("ciphertext outside [0, n^2)");
  mpz_class u;
  mpz_powm(u.get_mpz_t(), c.value.get_mpz_t(), sk.lambda.get_mpz_t(), pk.n_squared.get_mpz_t());
  mpz_class m = (lfunc(u, pk.n) * sk.mu) % pk.n;
  return m;
}

Ciphertext add_encrypted(const PublicKey& pk, const Ciphertext& c1, const Ciphertext& c2) {
  require_key(pk, c1.key_id);
  require_key(pk, c2.key_id);
  return Ciphertext{(c1.value * c2.value) % pk.n_squared, pk.key_id};
}

Ciphertext scalar_mul(const PublicKey& pk, const Ciphertext& c, const mpz_class& s) {
  require_key(pk, c.key_id);
  if (s < 0 || s >= pk.n) throw DomainError("scalar outside [0, n)");
  mpz_class out;
  mpz_powm(out.get_mpz_t(), c.value.get_mpz_t(), s.get_mpz_t(), pk.n_squared.get_mpz_t());
  return Ciphertext{std::move(out), pk.key_id};
}

std::vector<std::uint8_t> serialize_public_key(const PublicKey& pk) {
  std::vector<std::uint8_t> out;
  append_int(out, pk.n);
  return out;
}

std::vector<std::uint8_t> serialize_key_pair(const KeyPair& keys) {
  std::vector<std::uint8_t> out;
  append_int(out, keys.pub.n);
  append_int(out, keys.priv.lambda);
  append_int(out, keys.priv.mu);
  return out;
}

PublicKey deserialize_public_key(std::span<const std::uint8_t> bytes) {
  return PublicKey::from_modulus(read_ints(bytes, 1)[0]);
}

KeyPair deserialize_key_pair(std::span<const std::uint8_t> bytes) {
  auto ints = read_ints(bytes, 3);
  KeyPair keys;
  keys.pub = PublicKey::from_modulus(ints[0]);
  keys.priv.lambda = ints[1];
  keys.priv.mu = ints[2];
  keys.priv.key_id = keys.pub.key_id;
  return keys;
}

}  // namespace seigen::paillier
