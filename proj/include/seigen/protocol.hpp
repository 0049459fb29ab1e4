#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "seigen/bus.hpp"
#include "seigen/fixed_point.hpp"
#include "seigen/linalg.hpp"
#include "seigen/message.hpp"
#include "seigen/paillier.hpp"
#include "seigen/random.hpp"

namespace seigen::protocol {

// What the arbitrator sends in place of a withheld valid vector.
enum class ObfuscationStyle {
  kFreshRandom,      // uniform vector, freshly encrypted
  kPerturbedReplay,  // last released r_j u_j plus Gaussian noise
  kPerturbedMean,    // sum of the last few released r_j u_j plus noise
};

std::string_view to_string(ObfuscationStyle style);
ObfuscationStyle parse_obfuscation_style(std::string_view text);

struct ProtocolConfig {
  bool encryption = true;
  bool scaling = true;
  // One positive padding scalar per party; empty disables padding.
  std::vector<double> padding;
  // Probability that the arbitrator forwards a valid vector.
  double obfuscation_p = 1.0;
  // Absolute, in plaintext units of r u. Replay decoys need enough noise
  // that their shares do not recur within eps.
  double noise_sigma = 1.0;
  ObfuscationStyle obfuscation_style = ObfuscationStyle::kPerturbedReplay;
  double eps = 1e-8;
  int max_rounds = 2000;
  int window = 8;
  int repeat_count = 3;
  int fraction_bits = kDefaultFractionBits;
  std::uint64_t scalar_range = std::uint64_t{1} << 16;
  std::uint64_t seed = 1;
  unsigned key_bits = paillier::kDefaultKeyBits;

  bool padded() const noexcept { return !padding.empty(); }
  bool obfuscated() const noexcept { return obfuscation_p < 1.0; }
  // Throws ConfigError.
  void validate(std::size_t party_count) const;
};

// Independent random streams derived from ProtocolConfig::seed.
enum class Stream : std::uint64_t {
  kSession = 0,
  kScale = 1,
  kBernoulli = 2,
  kNoise = 3,
  kDecoy = 4,
  kKeygen = 5,
  kPartyInit = 100,
  kPartyEncrypt = 200,
};
RandomSource stream_rng(std::uint64_t seed, Stream stream, std::uint64_t offset = 0);

// Public parameters every actor agrees on before round 1.
struct Session {
  std::uint32_t session_id = 0;
  std::uint16_t party_count = 0;
  std::size_t k = 0;
  std::shared_ptr<const paillier::KeyPair> keys;  // null when encryption is off
  std::optional<FixedPointCodec> codec;           // null when encryption is off
  // Per-element bound for fresh random decoys.
  double decoy_bound = 1.0;
};

// Derives codec bounds from the (padded) data norms and the scalar range.
Session make_session(std::span<const DenseMatrix> datasets, const ProtocolConfig& config,
                     std::shared_ptr<const paillier::KeyPair> keys);

struct OpCounters {
  std::uint64_t encryptions = 0;
  std::uint64_t decryptions = 0;
  bool operator==(const OpCounters&) const = default;
};

struct PartyState {
  std::uint16_t party_id = 1;
  DenseMatrix data;  // padded when padding is configured
  std::size_t original_cols = 0;
  RealVector share;
  std::uint32_t round = 0;
  // Most recent share last; holds at most window + 1 entries.
  std::deque<RealVector> alpha_history;
  int near_streak = 0;
  bool converged = false;

  bool encryption = false;
  double eps = 1e-8;
  int window = 8;
  int repeat_count = 3;
  std::uint32_t session_id = 0;
  std::optional<FixedPointCodec> codec;
  std::shared_ptr<const paillier::KeyPair> keys;
  RandomSource encrypt_rng{0};

  std::vector<OpCounters> ops_by_round;
  std::vector<RealVector> share_log;
};

PartyState party_init(const DenseMatrix& data, const ProtocolConfig& config, const Session& session,
                      std::uint16_t party_id);
// E[A alpha] (or A alpha in plaintext mode).
Message party_phase1(PartyState& state);
// Returns t = A^T u and the SHARE_NORM message carrying |t|^2.
std::pair<RealVector, Message> party_phase2(PartyState& state, const Message& agg);
void party_update(PartyState& state, const Message& agg_norm, const RealVector& t);
// Appends a share to the history and advances the recurrence streak.
void observe_share(PartyState& state, RealVector share);
// True once the newest share has matched some share of the trailing
// window within eps (infinity norm) for repeat_count consecutive rounds.
bool convergence_check(const PartyState& state);
Message party_converged(const PartyState& state);
// FINAL_SHARE with the unpadded coordinates of the share, in clear.
Message party_final_share(const PartyState& state);

enum class EmissionKind { kValid, kReleased, kDecoy };
std::string_view to_string(EmissionKind kind);

// Arbitrator's private record of what it sent each round. Used only to
// score attacks, never given to them.
struct EmissionRecord {
  std::uint32_t round = 0;
  EmissionKind kind = EmissionKind::kValid;
  std::uint32_t source_round = 0;  // round whose aggregate was sent (0 for decoys)
  std::uint64_t scale = 1;
  bool operator==(const EmissionRecord&) const = default;
};

struct StoredVector {
  std::vector<Element> payload;
  std::uint64_t scale = 1;
  std::uint32_t round = 0;
};

// Trent. Holds the public key only; with encryption on every payload it
// stores is a ciphertext.
struct ArbitratorState {
  std::optional<paillier::PublicKey> public_key;
  std::optional<FixedPointCodec> codec;
  std::uint32_t session_id = 0;
  std::uint16_t party_count = 0;
  std::size_t k = 0;

  bool scaling = false;
  double obfuscation_p = 1.0;
  double noise_sigma = 0.0;
  ObfuscationStyle style = ObfuscationStyle::kPerturbedReplay;
  std::uint64_t scalar_range = 2;
  double decoy_bound = 1.0;

  std::uint32_t round = 0;
  std::optional<StoredVector> last_valid;  // present iff deferred
  bool deferred = false;
  std::uint64_t r_current = 1;
  bool in_flight_valid = true;

  RandomSource scale_rng{0};
  RandomSource bernoulli_rng{0};
  RandomSource noise_rng{0};
  RandomSource decoy_rng{0};
  // Scripted coin outcomes consumed before the Bernoulli source (true = valid).
  std::deque<bool> forced_coins;

  std::deque<StoredVector> u_history;  // released valid vectors, newest last
  std::vector<EmissionRecord> log;
};

inline constexpr std::size_t kMeanDecoyHistory = 3;

ArbitratorState arbitrator_init(const ProtocolConfig& config, const Session& session);
Message arbitrator_aggregate_vec(ArbitratorState& state, std::span<const Message> msgs);
Message arbitrator_aggregate_norm(ArbitratorState& state, std::span<const Message> msgs);
// Homomorphic sum of the norm shares times an integer scalar.
Message combine_norms(const ArbitratorState& state, std::span<const Message> msgs,
                      std::uint64_t scalar);

// Concatenates FINAL_SHARE payloads in party order, normalizes and
// sign-canonicalizes. Throws ProtocolError on a missing or duplicate share.
RealVector finalize(std::span<const Message> final_shares, std::uint16_t party_count);

struct ProtocolResult {
  RealVector eigenvector;
  int rounds_total = 0;
  int rounds_valid = 0;
  std::uint16_t first_converged_party = 0;
  Transcript transcript;
  std::vector<EmissionRecord> emissions;
  // [party][round] share after each update (padded coordinates included).
  std::vector<std::vector<RealVector>> share_history;
  // [party][round]
  std::vector<std::vector<OpCounters>> ops;
  std::shared_ptr<const paillier::KeyPair> keys;
  std::optional<FixedPointCodec> codec;
  double party_ms = 0.0;
  double arbitrator_ms = 0.0;
};

// Runs rounds until some party converges. Keys are generated from the
// seed when encryption is on and none are supplied.
ProtocolResult run_protocol(std::span<const DenseMatrix> datasets, const ProtocolConfig& config,
                            Bus& bus, std::shared_ptr<const paillier::KeyPair> keys = nullptr);

}  // namespace seigen::protocol
