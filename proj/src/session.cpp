#include <cmath>
#include <string>

#include "seigen/errors.hpp"
#include "seigen/protocol.hpp"

namespace seigen::protocol {

std::string_view to_string(ObfuscationStyle style) {
  switch (style) {
    case ObfuscationStyle::kFreshRandom: return "fresh_random";
    case ObfuscationStyle::kPerturbedReplay: return "perturbed_replay";
    case ObfuscationStyle::kPerturbedMean: return "perturbed_mean";
  }
  return "unknown";
}

ObfuscationStyle parse_obfuscation_style(std::string_view text) {
  if (text == "fresh_random") return ObfuscationStyle::kFreshRandom;
  if (text == "perturbed_replay") return ObfuscationStyle::kPerturbedReplay;
  if (text == "perturbed_mean") return ObfuscationStyle::kPerturbedMean;
  throw ConfigError("unknown obfuscation style '" + std::string(text) + "'");
}

std::string_view to_string(EmissionKind kind) {
  switch (kind) {
    case EmissionKind::kValid: return "valid";
    case EmissionKind::kReleased: return "released";
    case EmissionKind::kDecoy: return "decoy";
  }
  return "unknown";
}

void ProtocolConfig::validate(std::size_t party_count) const {
  if (!(obfuscation_p > 0.0 && obfuscation_p <= 1.0))
    throw ConfigError("obfuscation_p must lie in (0, 1]");
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be non-negative");
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (max_rounds < 1) throw ConfigError("max_rounds must be positive");
  if (window < 1 || repeat_count < 1) throw ConfigError("window and repeat_count must be positive");
  if (fraction_bits < kMinFractionBits) throw ConfigError("fraction_bits must be at least 16");
  if (scalar_range < 2) throw ConfigError("scalar_range must be at least 2");
  if (padded()) {
    if (padding.size() != party_count)
      throw ConfigError("padding needs one scalar per party");
    for (double r : padding)
      if (!(r > 0.0)) throw ConfigError("padding scalars must be positive");
  }
}

RandomSource stream_rng(std::uint64_t seed, Stream stream, std::uint64_t offset) {
  return RandomSource(derive_seed(seed, static_cast<std::uint64_t>(stream) + offset));
}

Session make_session(std::span<const DenseMatrix> datasets, const ProtocolConfig& config,
                     std::shared_ptr<const paillier::KeyPair> keys) {
  if (datasets.size() < 2) throw ConfigError("the protocol needs at least two parties");
  config.validate(datasets.size());
  Session session;
  session.party_count = static_cast<std::uint16_t>(datasets.size());
  session.k = datasets.front().rows();
  session.session_id =
      static_cast<std::uint32_t>(derive_seed(config.seed, static_cast<std::uint64_t>(Stream::kSession)));

  double fro2 = 0.0;
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    const auto& d = datasets[i];
    if (d.empty()) throw DomainError("party data must be non-empty");
    if (d.rows() != session.k) throw DimensionError("all parties must share the row count k");
    const double f = d.frobenius_norm();
    fro2 += f * f;
    if (config.padded()) fro2 += config.padding[i] * config.padding[i] * static_cast<double>(d.rows());
  }
  const double data_bound = std::max(1.0, std::sqrt(fro2));
  const double r_max = config.scaling ? static_cast<double>(config.scalar_range) : 1.0;
  // Aggregated vectors stay below vector_bound; norm shares below magnitude.
  const double vector_bound = 2.0 * r_max * data_bound;
  const double magnitude = 4.0 * static_cast<double>(session.party_count) * data_bound *
                               data_bound * vector_bound * vector_bound + 1.0;
  session.decoy_bound = vector_bound / std::sqrt(static_cast<double>(session.k));

  if (config.encryption) {
    if (!keys) throw ConfigError("encryption requires a key pair");
    session.keys = std::move(keys);
    const mpz_class r = config.scaling ? mpz_class(static_cast<unsigned long>(config.scalar_range)) : 1;
    try {
      session.codec.emplace(config.fraction_bits, session.keys->pub.n, magnitude, r * r);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("key too small for data range: ") + e.what());
    }
  }
  return session;
}

}  // namespace seigen::protocol
