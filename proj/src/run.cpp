#include <chrono>

#include "seigen/errors.hpp"
#include "seigen/protocol.hpp"

namespace seigen::protocol {

namespace {

using Clock = std::chrono::steady_clock;

class Stopwatch {
 public:
  explicit Stopwatch(double& sink) : sink_(sink), start_(Clock::now()) {}
  ~Stopwatch() {
    sink_ += std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
  }

 private:
  double& sink_;
  Clock::time_point start_;
};

Message expect(Bus& bus, std::uint16_t receiver) {
  auto m = bus.poll(receiver);
  if (!m) throw ProtocolError("expected message for endpoint " + std::to_string(receiver));
  return std::move(*m);
}

std::vector<Message> collect(Bus& bus, std::size_t count) {
  std::vector<Message> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(expect(bus, kArbitratorId));
  return out;
}

void broadcast(Bus& bus, const Message& msg, std::uint16_t party_count) {
  for (std::uint16_t p = 1; p <= party_count; ++p) bus.send(p, msg);
}

}  // namespace

ProtocolResult run_protocol(std::span<const DenseMatrix> datasets, const ProtocolConfig& config,
                            Bus& bus, std::shared_ptr<const paillier::KeyPair> keys) {
  if (datasets.size() != bus.party_count())
    throw ConfigError("bus endpoint count does not match the number of datasets");
  if (config.encryption && !keys) {
    auto rng = stream_rng(config.seed, Stream::kKeygen);
    keys = std::make_shared<const paillier::KeyPair>(paillier::keygen(config.key_bits, rng));
  }
  const Session session = make_session(datasets, config, keys);
  const std::uint16_t n_parties = session.party_count;

  ProtocolResult result;
  std::vector<PartyState> parties;
  parties.reserve(n_parties);
  for (std::uint16_t p = 1; p <= n_parties; ++p)
    parties.push_back(party_init(datasets[p - 1u], config, session, p));
  ArbitratorState trent = arbitrator_init(config, session);

  bool done = false;
  for (int round = 1; round <= config.max_rounds && !done; ++round) {
    {
      Stopwatch sw(result.party_ms);
      for (auto& party : parties) bus.send(kArbitratorId, party_phase1(party));
    }
    {
      Stopwatch sw(result.arbitrator_ms);
      const auto shares = collect(bus, n_parties);
      broadcast(bus, arbitrator_aggregate_vec(trent, shares), n_parties);
    }
    std::vector<RealVector> ts;
    {
      Stopwatch sw(result.party_ms);
      for (auto& party : parties) {
        auto [t, msg] = party_phase2(party, expect(bus, party.party_id));
        ts.push_back(std::move(t));
        bus.send(kArbitratorId, std::move(msg));
      }
    }
    {
      Stopwatch sw(result.arbitrator_ms);
      const auto norms = collect(bus, n_parties);
      broadcast(bus, arbitrator_aggregate_norm(trent, norms), n_parties);
    }
    std::vector<std::uint16_t> converged;
    {
      Stopwatch sw(result.party_ms);
      for (std::size_t i = 0; i < parties.size(); ++i) {
        auto& party = parties[i];
        party_update(party, expect(bus, party.party_id), ts[i]);
        if (party.converged) {
          converged.push_back(party.party_id);
          bus.send(kArbitratorId, party_converged(party));
        }
      }
    }
    result.rounds_total = round;
    if (converged.empty()) continue;

    // Any single party converging ends the run: Trent asks everyone for
    // their share in clear.
    result.first_converged_party = converged.front();
    std::vector<Message> finals;
    {
      Stopwatch sw(result.arbitrator_ms);
      collect(bus, converged.size());
      broadcast(bus,
                Message::with_reals(MessageType::kConverged, session.session_id, trent.round,
                                    kArbitratorId, {}),
                n_parties);
    }
    {
      Stopwatch sw(result.party_ms);
      for (auto& party : parties) {
        const auto request = expect(bus, party.party_id);
        if (request.type != MessageType::kConverged) throw ProtocolError("expected share request");
        bus.send(kArbitratorId, party_final_share(party));
      }
    }
    {
      Stopwatch sw(result.arbitrator_ms);
      finals = collect(bus, n_parties);
      result.eigenvector = finalize(finals, n_parties);
    }
    done = true;
  }

  for (const auto& e : trent.log)
    if (e.kind != EmissionKind::kDecoy) ++result.rounds_valid;
  result.emissions = trent.log;
  result.transcript = bus.transcript();
  result.keys = session.keys;
  result.codec = session.codec;
  for (auto& party : parties) {
    result.share_history.push_back(std::move(party.share_log));
    result.ops.push_back(std::move(party.ops_by_round));
  }
  if (!done) {
    RealVector last;
    for (const auto& h : result.share_history)
      if (!h.empty()) last.insert(last.end(), h.back().begin(), h.back().end());
    throw NonConvergenceError("no party converged within " + std::to_string(config.max_rounds) +
                                  " rounds",
                              std::move(last));
  }
  return result;
}

}  // namespace seigen::protocol
