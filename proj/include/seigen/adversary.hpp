#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "seigen/bus.hpp"
#include "seigen/fixed_point.hpp"
#include "seigen/linalg.hpp"
#include "seigen/paillier.hpp"
#include "seigen/protocol.hpp"

namespace seigen::adversary {

// One round as a semi-honest party saw it.
struct PartyRound {
  std::uint32_t round = 0;
  RealVector own_product;  // A alpha_i, as sent
  RealVector received;     // what came back (r_i u_i, or a decoy)
  double own_norm = 0.0;
  double received_norm = 0.0;
};

struct PartyView {
  std::uint16_t party_id = 0;
  std::vector<PartyRound> rounds;

  std::vector<RealVector> received_vectors() const;
};

// Builds the view from the records the party sent or received, decrypting
// with the party's own key. keys/codec may be null for plaintext runs.
PartyView make_party_view(const Transcript& transcript, std::uint16_t party,
                          const paillier::KeyPair* keys, const FixedPointCodec* codec);

// d_i = u_i - A alpha_i lies in the other parties' column space unless the
// arbitrator scales u_i. Returns the leading `rank` directions of the d_i
// over the first `max_rounds` rounds (0 = all).
struct ColspaceEstimate {
  std::vector<RealVector> differences;
  std::vector<RealVector> basis;
};
ColspaceEstimate attack_colspace(const PartyView& view, std::size_t rank,
                                 std::size_t max_rounds = 0);

// Projects every received vector onto the party's left null space.
struct NullspaceEstimate {
  bool attack_void = false;  // own data has no left null space
  std::vector<RealVector> null_basis;
  std::vector<RealVector> projections;  // coordinates in null_basis
};
NullspaceEstimate attack_nullspace(const PartyView& view, const DenseMatrix& own_data, double tol);
NullspaceEstimate attack_nullspace(const PartyView& view, const DenseMatrix& own_data);

// Orthonormal basis (in null-space coordinates) of the other data's column
// space projected onto `null_basis`. Evaluation only.
std::vector<RealVector> projected_column_space(std::span<const RealVector> null_basis,
                                               const DenseMatrix& other_data);

// Second eigenvector of M M^T from a received u sequence: each u_i is
// normalized and deflated against u_conv; the deflated sequence is itself a
// power iteration on the deflated operator, so its most advanced iterate
// that still carries signal above `signal_floor` is the estimate.
struct KrylovEstimate {
  bool has_signal = false;
  EigenPair second;  // value: observed per-round decay of the deflated part
  std::size_t source_index = 0;
};
inline constexpr double kDefaultSignalFloor = 1e-6;
KrylovEstimate attack_krylov(std::span<const RealVector> u_sequence, std::span<const double> u_conv,
                             double signal_floor = kDefaultSignalFloor);

// Scores each normalized vector by its distance to the trailing-window
// mean, in units of the trailing window's own distance spread; scores above
// z_threshold are labelled decoys. The first `window` vectors are unscored.
// With exclude_flagged, vectors already labelled decoys are left out of
// later windows so one decoy cannot mask the next.
struct OutlierResult {
  std::vector<bool> decoy;
  std::vector<double> score;
};
OutlierResult attack_outlier(std::span<const RealVector> received, std::size_t window,
                             double z_threshold, bool exclude_flagged = true);

struct DetectionMetrics {
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t false_negative = 0;
  std::size_t true_negative = 0;
  std::optional<double> precision;  // undefined when nothing was flagged
  std::optional<double> recall;     // undefined when there were no decoys
};
DetectionMetrics score_detection(const std::vector<bool>& predicted, const std::vector<bool>& truth,
                                 std::size_t skip = 0);
// Per-round decoy flags from the arbitrator's private log.
std::vector<bool> decoy_ground_truth(std::span<const protocol::EmissionRecord> log);

// C(n_rounds, k): subsets an attacker must test to locate a length-k
// Krylov run among n_rounds received vectors.
mpz_class krylov_verification_cost(std::uint64_t k, std::uint64_t n_rounds);

double max_principal_angle(std::span<const RealVector> estimate, std::span<const RealVector> truth);

struct AttackReport {
  std::string attack;
  std::string mode;
  std::string metric;
  double value = 0.0;
  double threshold = 0.0;
  bool success = false;
  std::string note;

  // attack=... mode=... metric=... value=... threshold=... success=...
  std::string render() const;
};

}  // namespace seigen::adversary
