#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "seigen/message.hpp"

namespace seigen {

struct TranscriptRecord {
  std::uint32_t sequence = 0;
  std::uint32_t round = 0;
  std::uint16_t sender = 0;
  std::uint16_t receiver = 0;
  Message message;
  std::vector<std::uint8_t> frame;  // serialize(message)
};

// Ordered log of every transmission on a bus.
//
// File form: "EVTR" | u32 version (1) | records, where each record is
//   u32 sequence | u16 sender | u16 receiver | u32 byte length | frame
class Transcript {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  void append(TranscriptRecord record);
  const std::vector<TranscriptRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }

  std::vector<std::uint8_t> to_bytes() const;
  static Transcript from_bytes(std::span<const std::uint8_t> bytes);
  void save(const std::string& path) const;
  static Transcript load(const std::string& path);

 private:
  std::vector<TranscriptRecord> records_;
};

// In-process star network: endpoint 0 is the arbitrator, 1..N the parties.
// Delivery is FIFO per (sender, receiver); every send is recorded in the
// transcript together with its serialized size. Safe to share between
// threads.
class Bus {
 public:
  explicit Bus(std::uint16_t party_count);

  std::uint16_t party_count() const noexcept { return party_count_; }

  // Throws TopologyError for party-to-party (or arbitrator-to-self)
  // traffic and DomainError for unknown endpoints.
  void send(std::uint16_t receiver, Message msg);
  std::optional<Message> poll(std::uint16_t receiver);

  Transcript transcript() const;

 private:
  std::uint16_t party_count_;
  mutable std::mutex mutex_;
  std::vector<std::deque<Message>> inboxes_;
  Transcript transcript_;
  std::uint32_t next_sequence_ = 0;
};

struct TrafficCount {
  std::uint64_t messages = 0;
  std::uint64_t elements = 0;
  std::uint64_t bytes = 0;

  bool operator==(const TrafficCount&) const = default;
};

struct CostReport {
  // Iteration traffic (SHARE_VEC, AGG_VEC, SHARE_NORM, AGG_NORM) by round.
  std::map<std::uint32_t, TrafficCount> per_round;
  TrafficCount iteration_total;
  // CONVERGED and FINAL_SHARE traffic.
  TrafficCount control_total;
  TrafficCount total;
};

// Counts payload elements and frame bytes for rounds in [first, last].
// A broadcast reply counts once per recipient, which is what makes a
// two-party round add up to 4k + 4 elements.
CostReport account(const Transcript& transcript, std::uint32_t first_round,
                   std::uint32_t last_round);

}  // namespace seigen
