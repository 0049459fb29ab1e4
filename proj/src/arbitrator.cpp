#include <set>
#include <string>

#include "seigen/errors.hpp"
#include "seigen/protocol.hpp"

namespace seigen::protocol {

namespace {

bool encrypted(const ArbitratorState& s) { return s.public_key.has_value(); }

std::vector<Element> add_payloads(const ArbitratorState& s, const std::vector<Element>& a,
                                  const std::vector<Element>& b) {
  if (a.size() != b.size()) throw ProtocolError("payload length mismatch");
  std::vector<Element> out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (encrypted(s)) {
      const auto& pk = *s.public_key;
      out.emplace_back(paillier::add_encrypted(pk, {std::get<mpz_class>(a[i]), pk.key_id},
                                               {std::get<mpz_class>(b[i]), pk.key_id})
                           .value);
    } else {
      out.emplace_back(std::get<double>(a[i]) + std::get<double>(b[i]));
    }
  }
  return out;
}

std::vector<Element> scale_payload(const ArbitratorState& s, const std::vector<Element>& a,
                                   std::uint64_t scalar) {
  if (scalar == 1) return a;
  std::vector<Element> out;
  out.reserve(a.size());
  const mpz_class sc(static_cast<unsigned long>(scalar));
  for (const auto& e : a) {
    if (encrypted(s)) {
      const auto& pk = *s.public_key;
      out.emplace_back(paillier::scalar_mul(pk, {std::get<mpz_class>(e), pk.key_id}, sc).value);
    } else {
      out.emplace_back(std::get<double>(e) * static_cast<double>(scalar));
    }
  }
  return out;
}

// Encrypts (or passes through) a plaintext real vector under the public key.
std::vector<Element> seal(ArbitratorState& s, const RealVector& values) {
  std::vector<Element> out;
  out.reserve(values.size());
  for (double v : values) {
    if (encrypted(s))
      out.emplace_back(paillier::encrypt(*s.public_key, s.codec->encode(v), s.decoy_rng).value);
    else
      out.emplace_back(v);
  }
  return out;
}

// Validates one message per party, all of `type`, for the current round.
void check_inputs(const ArbitratorState& s, std::span<const Message> msgs, MessageType type,
                  std::size_t length) {
  if (msgs.size() != s.party_count)
    throw ProtocolError("expected " + std::to_string(s.party_count) + " messages, got " +
                        std::to_string(msgs.size()));
  std::set<std::uint16_t> senders;
  for (const auto& m : msgs) {
    if (m.type != type) throw ProtocolError("unexpected message type " + std::string(to_string(m.type)));
    if (m.round != s.round) throw ProtocolError("round skew: message for round " +
                                                std::to_string(m.round) + ", arbitrator at " +
                                                std::to_string(s.round));
    if (m.sender == kArbitratorId || m.sender > s.party_count || !senders.insert(m.sender).second)
      throw ProtocolError("bad or duplicate sender");
    if (m.payload.size() != length) throw ProtocolError("payload length mismatch");
    if ((m.kind == PayloadKind::kBigInt) != encrypted(s))
      throw ProtocolError("payload kind does not match encryption mode");
  }
}

bool draw_coin(ArbitratorState& s) {
  if (!s.forced_coins.empty()) {
    const bool coin = s.forced_coins.front();
    s.forced_coins.pop_front();
    return coin;
  }
  return s.bernoulli_rng.bernoulli(s.obfuscation_p);
}

std::vector<Element> make_decoy(ArbitratorState& s) {
  if (s.style == ObfuscationStyle::kFreshRandom) {
    RealVector values(s.k);
    for (double& v : values) v = s.decoy_rng.uniform(-s.decoy_bound, s.decoy_bound);
    return seal(s, values);
  }
  // Base for perturbed decoys: released history, else the withheld candidate.
  std::vector<Element> base;
  if (s.u_history.empty()) {
    base = s.last_valid->payload;
  } else if (s.style == ObfuscationStyle::kPerturbedReplay) {
    base = s.u_history.back().payload;
  } else {
    // No homomorphic division, so the "mean" is a sum; the count factor is
    // indistinguishable from the unknown scaling.
    base = s.u_history.back().payload;
    for (std::size_t i = 1; i < std::min(kMeanDecoyHistory, s.u_history.size()); ++i)
      base = add_payloads(s, base, s.u_history[s.u_history.size() - 1 - i].payload);
  }
  RealVector noise(s.k);
  for (double& e : noise) e = s.noise_sigma > 0.0 ? s.noise_rng.normal(s.noise_sigma) : 0.0;
  return add_payloads(s, base, seal(s, noise));
}

void remember_release(ArbitratorState& s, StoredVector v) {
  s.u_history.push_back(std::move(v));
  while (s.u_history.size() > kMeanDecoyHistory) s.u_history.pop_front();
}

}  // namespace

ArbitratorState arbitrator_init(const ProtocolConfig& config, const Session& session) {
  ArbitratorState s;
  if (session.keys) s.public_key = session.keys->pub;
  s.codec = session.codec;
  s.session_id = session.session_id;
  s.party_count = session.party_count;
  s.k = session.k;
  s.scaling = config.scaling;
  s.obfuscation_p = config.obfuscation_p;
  s.noise_sigma = config.noise_sigma;
  s.style = config.obfuscation_style;
  s.scalar_range = config.scalar_range;
  s.decoy_bound = session.decoy_bound;
  s.scale_rng = stream_rng(config.seed, Stream::kScale);
  s.bernoulli_rng = stream_rng(config.seed, Stream::kBernoulli);
  s.noise_rng = stream_rng(config.seed, Stream::kNoise);
  s.decoy_rng = stream_rng(config.seed, Stream::kDecoy);
  return s;
}

Message arbitrator_aggregate_vec(ArbitratorState& s, std::span<const Message> msgs) {
  ++s.round;
  check_inputs(s, msgs, MessageType::kShareVec, s.k);

  std::vector<Element> emitted;
  EmissionRecord record{s.round, EmissionKind::kValid, s.round, 1};
  if (!s.deferred) {
    std::vector<Element> sum = msgs[0].payload;
    for (std::size_t i = 1; i < msgs.size(); ++i) sum = add_payloads(s, sum, msgs[i].payload);
    const std::uint64_t r = s.scaling ? s.scale_rng.uniform_int(2, s.scalar_range) : 1;
    StoredVector candidate{scale_payload(s, sum, r), r, s.round};
    if (draw_coin(s)) {
      emitted = candidate.payload;
      record.scale = r;
      s.r_current = r;
      s.in_flight_valid = true;
      remember_release(s, std::move(candidate));
    } else {
      s.last_valid = std::move(candidate);
      s.deferred = true;
      emitted = make_decoy(s);
      record = {s.round, EmissionKind::kDecoy, 0, 1};
      s.in_flight_valid = false;
    }
  } else {
    // Inputs computed from a decoy are ignored.
    if (draw_coin(s)) {
      StoredVector released = std::move(*s.last_valid);
      s.last_valid.reset();
      s.deferred = false;
      emitted = released.payload;
      record = {s.round, EmissionKind::kReleased, released.round, released.scale};
      s.r_current = released.scale;
      s.in_flight_valid = true;
      remember_release(s, std::move(released));
    } else {
      emitted = make_decoy(s);
      record = {s.round, EmissionKind::kDecoy, 0, 1};
      s.in_flight_valid = false;
    }
  }
  s.log.push_back(record);

  Message out{MessageType::kAggVec, s.session_id, s.round, kArbitratorId,
              encrypted(s) ? PayloadKind::kBigInt : PayloadKind::kReal, std::move(emitted)};
  return out;
}

Message combine_norms(const ArbitratorState& s, std::span<const Message> msgs,
                      std::uint64_t scalar) {
  check_inputs(s, msgs, MessageType::kShareNorm, 1);
  std::vector<Element> sum = msgs[0].payload;
  for (std::size_t i = 1; i < msgs.size(); ++i) sum = add_payloads(s, sum, msgs[i].payload);
  return Message{MessageType::kAggNorm, s.session_id, s.round, kArbitratorId,
                 encrypted(s) ? PayloadKind::kBigInt : PayloadKind::kReal,
                 scale_payload(s, sum, scalar)};
}

Message arbitrator_aggregate_norm(ArbitratorState& s, std::span<const Message> msgs) {
  // The shares were computed from r_i u_i and already carry r_i^2, so no
  // further scaling is applied, in valid and decoy rounds alike.
  return combine_norms(s, msgs, 1);
}

}  // namespace seigen::protocol
