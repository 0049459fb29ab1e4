#include <cmath>
#include <limits>

#include "seigen/errors.hpp"
#include "seigen/protocol.hpp"

namespace seigen::protocol {

PartyState party_init(const DenseMatrix& data, const ProtocolConfig& config, const Session& session,
                      std::uint16_t party_id) {
  if (data.empty()) throw DomainError("party data must be non-empty");
  if (!data.all_finite()) throw DomainError("party data must be finite");
  if (party_id == kArbitratorId) throw DomainError("party ids start at 1");

  PartyState state;
  state.party_id = party_id;
  state.original_cols = data.cols();
  state.data = config.padded() ? pad_matrix(data, config.padding.at(party_id - 1u)) : data;
  state.encryption = config.encryption;
  state.eps = config.eps;
  state.window = config.window;
  state.repeat_count = config.repeat_count;
  state.session_id = session.session_id;
  state.codec = session.codec;
  state.keys = session.keys;
  state.encrypt_rng = stream_rng(config.seed, Stream::kPartyEncrypt, party_id);

  auto init_rng = stream_rng(config.seed, Stream::kPartyInit, party_id);
  state.share.resize(state.data.cols());
  for (double& x : state.share) x = init_rng.uniform(-1.0, 1.0);
  return state;
}

Message party_phase1(PartyState& state) {
  if (state.converged) throw ProtocolError("party already converged");
  ++state.round;
  state.ops_by_round.emplace_back();
  const RealVector product = matvec(state.data, state.share);
  if (!state.encryption)
    return Message::with_reals(MessageType::kShareVec, state.session_id, state.round,
                               state.party_id, product);
  auto encoded = state.codec->encode_vector(product);
  std::vector<mpz_class> cipher;
  cipher.reserve(encoded.size());
  for (const auto& m : encoded) {
    cipher.push_back(paillier::encrypt(state.keys->pub, m, state.encrypt_rng).value);
    ++state.ops_by_round.back().encryptions;
  }
  return Message::with_bigints(MessageType::kShareVec, state.session_id, state.round,
                               state.party_id, std::move(cipher));
}

namespace {

double decrypt_one(PartyState& state, const mpz_class& value) {
  try {
    const auto m = paillier::decrypt(state.keys->priv, state.keys->pub,
                                     paillier::Ciphertext{value, state.keys->pub.key_id});
    ++state.ops_by_round.back().decryptions;
    return state.codec->decode(m);
  } catch (const Error& e) {
    throw ProtocolError(std::string("decryption failed: ") + e.what());
  }
}

void check_reply(const PartyState& state, const Message& msg, MessageType expected) {
  if (msg.type != expected) throw ProtocolError("unexpected message type");
  if (msg.round != state.round) throw ProtocolError("round skew in arbitrator reply");
  if (msg.sender != kArbitratorId) throw ProtocolError("reply not from arbitrator");
  if (state.ops_by_round.empty()) throw ProtocolError("reply before phase 1");
}

}  // namespace

std::pair<RealVector, Message> party_phase2(PartyState& state, const Message& agg) {
  check_reply(state, agg, MessageType::kAggVec);
  if (agg.payload.size() != state.data.rows()) throw ProtocolError("aggregate has wrong length");
  RealVector u;
  if (state.encryption) {
    for (const auto& c : agg.bigints()) u.push_back(decrypt_one(state, c));
  } else {
    u = agg.reals();
  }
  RealVector t = matvec_transpose(state.data, u);
  const double norm = norm2_squared(t);
  if (!state.encryption) {
    const double one[] = {norm};
    return {std::move(t), Message::with_reals(MessageType::kShareNorm, state.session_id,
                                              state.round, state.party_id, one)};
  }
  auto c = paillier::encrypt(state.keys->pub, state.codec->encode(norm), state.encrypt_rng);
  ++state.ops_by_round.back().encryptions;
  std::vector<mpz_class> payload;
  payload.push_back(std::move(c.value));
  return {std::move(t), Message::with_bigints(MessageType::kShareNorm, state.session_id,
                                              state.round, state.party_id, std::move(payload))};
}

void party_update(PartyState& state, const Message& agg_norm, const RealVector& t) {
  check_reply(state, agg_norm, MessageType::kAggNorm);
  if (agg_norm.payload.size() != 1) throw ProtocolError("norm aggregate has wrong length");
  const double total =
      state.encryption ? decrypt_one(state, agg_norm.bigints().front()) : agg_norm.reals().front();
  if (!(total > 0.0)) throw DegenerateError("non-positive norm sum; data is identically zero");
  // t carries r_i and total carries r_i^2, so the scale cancels here.
  RealVector share = scaled(t, 1.0 / std::sqrt(total));
  state.share = share;
  state.share_log.push_back(share);
  observe_share(state, std::move(share));
}

void observe_share(PartyState& state, RealVector share) {
  bool near = false;
  if (!state.alpha_history.empty()) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& past : state.alpha_history)
      if (past.size() == share.size()) best = std::min(best, norm_inf(axpy(-1.0, past, share)));
    near = best < state.eps;
  }
  state.near_streak = near ? state.near_streak + 1 : 0;
  state.alpha_history.push_back(std::move(share));
  while (state.alpha_history.size() > static_cast<std::size_t>(state.window) + 1)
    state.alpha_history.pop_front();
  state.converged = convergence_check(state);
}

bool convergence_check(const PartyState& state) {
  return state.alpha_history.size() >= 2 && state.near_streak >= state.repeat_count;
}

Message party_converged(const PartyState& state) {
  return Message::with_reals(MessageType::kConverged, state.session_id, state.round,
                             state.party_id, {});
}

Message party_final_share(const PartyState& state) {
  return Message::with_reals(MessageType::kFinalShare, state.session_id, state.round,
                             state.party_id,
                             std::span<const double>(state.share).first(state.original_cols));
}

RealVector finalize(std::span<const Message> final_shares, std::uint16_t party_count) {
  std::vector<const Message*> by_party(party_count + 1u, nullptr);
  for (const auto& m : final_shares) {
    if (m.type != MessageType::kFinalShare) throw ProtocolError("expected FINAL_SHARE");
    if (m.sender == kArbitratorId || m.sender > party_count)
      throw ProtocolError("FINAL_SHARE from unknown party");
    if (by_party[m.sender]) throw ProtocolError("duplicate FINAL_SHARE");
    by_party[m.sender] = &m;
  }
  RealVector out;
  for (std::uint16_t p = 1; p <= party_count; ++p) {
    if (!by_party[p]) throw ProtocolError("missing FINAL_SHARE from party " + std::to_string(p));
    const auto share = by_party[p]->reals();
    out.insert(out.end(), share.begin(), share.end());
  }
  out = normalize(out);
  canonicalize_sign(out);
  return out;
}

}  // namespace seigen::protocol
