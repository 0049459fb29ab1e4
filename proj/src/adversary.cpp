#include "seigen/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "seigen/errors.hpp"

namespace seigen::adversary {

std::vector<RealVector> PartyView::received_vectors() const {
  std::vector<RealVector> out;
  out.reserve(rounds.size());
  for (const auto& r : rounds) out.push_back(r.received);
  return out;
}

namespace {

RealVector open_vector(const Message& m, const paillier::KeyPair* keys,
                       const FixedPointCodec* codec) {
  if (m.kind == PayloadKind::kReal) return m.reals();
  if (!keys || !codec) throw KeyError("encrypted transcript needs the party's key and codec");
  RealVector out;
  for (const auto& c : m.bigints())
    out.push_back(codec->decode(paillier::decrypt(keys->priv, keys->pub, {c, keys->pub.key_id})));
  return out;
}

}  // namespace

PartyView make_party_view(const Transcript& transcript, std::uint16_t party,
                          const paillier::KeyPair* keys, const FixedPointCodec* codec) {
  std::map<std::uint32_t, PartyRound> rounds;
  std::map<std::uint32_t, int> seen;
  for (const auto& rec : transcript.records()) {
    if (rec.sender != party && rec.receiver != party) continue;
    const auto& m = rec.message;
    auto& r = rounds[m.round];
    r.round = m.round;
    const bool outgoing = rec.sender == party;
    switch (m.type) {
      case MessageType::kShareVec:
        if (outgoing) r.own_product = open_vector(m, keys, codec), seen[m.round] |= 1;
        break;
      case MessageType::kAggVec:
        if (!outgoing) r.received = open_vector(m, keys, codec), seen[m.round] |= 2;
        break;
      case MessageType::kShareNorm:
        if (outgoing) r.own_norm = open_vector(m, keys, codec).at(0), seen[m.round] |= 4;
        break;
      case MessageType::kAggNorm:
        if (!outgoing) r.received_norm = open_vector(m, keys, codec).at(0), seen[m.round] |= 8;
        break;
      default:
        break;
    }
  }
  PartyView view;
  view.party_id = party;
  for (auto& [round, r] : rounds)
    if (seen[round] == 15) view.rounds.push_back(std::move(r));
  return view;
}

ColspaceEstimate attack_colspace(const PartyView& view, std::size_t rank, std::size_t max_rounds) {
  const std::size_t used =
      max_rounds == 0 ? view.rounds.size() : std::min(max_rounds, view.rounds.size());
  if (used < rank || rank == 0)
    throw InsufficientDataError("colspace attack needs at least `rank` rounds");
  ColspaceEstimate est;
  for (std::size_t i = 0; i < used; ++i)
    est.differences.push_back(axpy(-1.0, view.rounds[i].own_product, view.rounds[i].received));
  est.basis = dominant_subspace(est.differences, rank);
  return est;
}

NullspaceEstimate attack_nullspace(const PartyView& view, const DenseMatrix& own_data, double tol) {
  NullspaceEstimate est;
  est.null_basis = left_null_space(own_data, tol);
  if (est.null_basis.empty()) {
    est.attack_void = true;
    return est;
  }
  for (const auto& r : view.rounds) {
    RealVector coords;
    coords.reserve(est.null_basis.size());
    for (const auto& n : est.null_basis) coords.push_back(dot(n, r.received));
    est.projections.push_back(std::move(coords));
  }
  return est;
}

NullspaceEstimate attack_nullspace(const PartyView& view, const DenseMatrix& own_data) {
  return attack_nullspace(view, own_data, default_null_tolerance(own_data));
}

std::vector<RealVector> projected_column_space(std::span<const RealVector> null_basis,
                                               const DenseMatrix& other_data) {
  DenseMatrix projected(null_basis.size(), other_data.cols());
  for (std::size_t i = 0; i < null_basis.size(); ++i) {
    const RealVector row = matvec_transpose(other_data, null_basis[i]);
    for (std::size_t c = 0; c < row.size(); ++c) projected(i, c) = row[c];
  }
  const double f = projected.frobenius_norm();
  if (f == 0.0) return {};
  return column_space(projected, 1e-12 * f * f);
}

KrylovEstimate attack_krylov(std::span<const RealVector> u_sequence, std::span<const double> u_conv,
                             double signal_floor) {
  if (u_sequence.size() < 3) throw InsufficientDataError("Krylov attack needs at least 3 vectors");
  if (std::fabs(norm2(u_conv) - 1.0) > 1e-8) throw DomainError("u_conv must be unit-normalized");
  std::vector<RealVector> deflated;
  std::vector<double> signal;
  for (const auto& u : u_sequence) {
    const double n = norm2(u);
    RealVector w = n > 0.0 ? deflate(scaled(u, 1.0 / n), u_conv) : RealVector(u.size(), 0.0);
    signal.push_back(norm2(w));
    deflated.push_back(std::move(w));
  }
  KrylovEstimate est;
  for (std::size_t i = deflated.size(); i-- > 0;) {
    if (signal[i] >= signal_floor) {
      est.has_signal = true;
      est.source_index = i;
      est.second.vector = normalize(deflated[i]);
      canonicalize_sign(est.second.vector);
      est.second.value = i > 0 && signal[i - 1] > 0.0 ? signal[i] / signal[i - 1] : 0.0;
      break;
    }
  }
  return est;
}

OutlierResult attack_outlier(std::span<const RealVector> received, std::size_t window,
                             double z_threshold, bool exclude_flagged) {
  if (window == 0) throw DomainError("outlier window must be positive");
  if (received.size() < window + 1) throw InsufficientDataError("need at least window + 1 vectors");
  std::vector<RealVector> unit;
  unit.reserve(received.size());
  for (const auto& v : received) unit.push_back(normalize(v));

  OutlierResult out;
  out.decoy.assign(unit.size(), false);
  out.score.assign(unit.size(), 0.0);
  std::vector<std::size_t> reference;  // indices forming the trailing window
  for (std::size_t i = 0; i < window; ++i) reference.push_back(i);
  for (std::size_t i = window; i < unit.size(); ++i) {
    const std::span<const std::size_t> trail(reference.end() - static_cast<std::ptrdiff_t>(window),
                                             reference.end());
    RealVector mean(unit[i].size(), 0.0);
    for (const std::size_t j : trail) mean = axpy(1.0, unit[j], mean);
    mean = scaled(mean, 1.0 / static_cast<double>(window));
    double mu = 0.0;
    double sq = 0.0;
    for (const std::size_t j : trail) {
      const double d = norm2(axpy(-1.0, mean, unit[j]));
      mu += d;
      sq += d * d;
    }
    mu /= static_cast<double>(window);
    const double sd = std::sqrt(std::max(0.0, sq / static_cast<double>(window) - mu * mu));
    const double d = norm2(axpy(-1.0, mean, unit[i]));
    double z;
    if (sd > 1e-15)
      z = (d - mu) / sd;
    else
      z = d - mu > 1e-12 ? std::numeric_limits<double>::infinity() : 0.0;
    out.score[i] = z;
    out.decoy[i] = z > z_threshold;
    if (!(exclude_flagged && out.decoy[i])) reference.push_back(i);
  }
  return out;
}

DetectionMetrics score_detection(const std::vector<bool>& predicted, const std::vector<bool>& truth,
                                 std::size_t skip) {
  if (predicted.size() != truth.size()) throw DimensionError("label vectors differ in length");
  DetectionMetrics m;
  for (std::size_t i = skip; i < truth.size(); ++i) {
    if (predicted[i] && truth[i]) ++m.true_positive;
    else if (predicted[i]) ++m.false_positive;
    else if (truth[i]) ++m.false_negative;
    else ++m.true_negative;
  }
  if (m.true_positive + m.false_positive > 0)
    m.precision = static_cast<double>(m.true_positive) /
                  static_cast<double>(m.true_positive + m.false_positive);
  if (m.true_positive + m.false_negative > 0)
    m.recall = static_cast<double>(m.true_positive) /
               static_cast<double>(m.true_positive + m.false_negative);
  return m;
}

std::vector<bool> decoy_ground_truth(std::span<const protocol::EmissionRecord> log) {
  std::vector<bool> out;
  out.reserve(log.size());
  for (const auto& e : log) out.push_back(e.kind == protocol::EmissionKind::kDecoy);
  return out;
}

mpz_class krylov_verification_cost(std::uint64_t k, std::uint64_t n_rounds) {
  if (n_rounds < k) throw DomainError("need at least k rounds");
  k = std::min(k, n_rounds - k);
  mpz_class result = 1;
  // Each partial product is itself a binomial coefficient, so the division is exact.
  for (std::uint64_t i = 1; i <= k; ++i) {
    result *= static_cast<unsigned long>(n_rounds - k + i);
    mpz_divexact_ui(result.get_mpz_t(), result.get_mpz_t(), static_cast<unsigned long>(i));
  }
  return result;
}

double max_principal_angle(std::span<const RealVector> estimate, std::span<const RealVector> truth) {
  const auto angles = principal_angles(estimate, truth);
  return angles.empty() ? 0.0 : angles.back();
}

std::string AttackReport::render() const {
  char value_buf[32];
  char thr_buf[32];
  std::snprintf(value_buf, sizeof value_buf, "%.6g", value);
  std::snprintf(thr_buf, sizeof thr_buf, "%.6g", threshold);
  std::string line = "attack=" + attack + " mode=" + mode + " metric=" + metric +
                     " value=" + value_buf + " threshold=" + thr_buf +
                     " success=" + (success ? "true" : "false");
  if (!note.empty()) line += " note=" + note;
  return line;
}

}  // namespace seigen::adversary
