#include "seigen/bus.hpp"

#include <fstream>
#include <iterator>
#include <limits>

#include "seigen/errors.hpp"

namespace seigen {

namespace {

void put_be(std::vector<std::uint8_t>& out, std::uint64_t v, int width) {
  for (int shift = 8 * (width - 1); shift >= 0; shift -= 8)
    out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint64_t get_be(std::span<const std::uint8_t> bytes, std::size_t& pos, int width) {
  if (bytes.size() - pos < static_cast<std::size_t>(width))
    throw ParseError("truncated transcript", pos);
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v = (v << 8) | bytes[pos++];
  return v;
}

constexpr std::uint8_t kTranscriptMagic[4] = {'E', 'V', 'T', 'R'};

}  // namespace

void Transcript::append(TranscriptRecord record) {
  if (!records_.empty() && record.sequence <= records_.back().sequence)
    throw ProtocolError("transcript sequence numbers must increase");
  records_.push_back(std::move(record));
}

std::vector<std::uint8_t> Transcript::to_bytes() const {
  std::vector<std::uint8_t> out(std::begin(kTranscriptMagic), std::end(kTranscriptMagic));
  put_be(out, kFormatVersion, 4);
  for (const auto& r : records_) {
    put_be(out, r.sequence, 4);
    put_be(out, r.sender, 2);
    put_be(out, r.receiver, 2);
    put_be(out, r.frame.size(), 4);
    out.insert(out.end(), r.frame.begin(), r.frame.end());
  }
  return out;
}

Transcript Transcript::from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) throw ParseError("truncated transcript header", bytes.size());
  for (std::size_t i = 0; i < 4; ++i)
    if (bytes[i] != kTranscriptMagic[i]) throw ParseError("bad transcript magic", i);
  std::size_t pos = 4;
  if (get_be(bytes, pos, 4) != kFormatVersion) throw ParseError("unsupported transcript version", 4);
  Transcript t;
  while (pos < bytes.size()) {
    TranscriptRecord r;
    r.sequence = static_cast<std::uint32_t>(get_be(bytes, pos, 4));
    r.sender = static_cast<std::uint16_t>(get_be(bytes, pos, 2));
    r.receiver = static_cast<std::uint16_t>(get_be(bytes, pos, 2));
    const auto len = get_be(bytes, pos, 4);
    if (bytes.size() - pos < len) throw ParseError("truncated transcript frame", pos);
    r.frame.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                   bytes.begin() + static_cast<std::ptrdiff_t>(pos + len));
    try {
      r.message = deserialize(r.frame);
    } catch (const ParseError& e) {
      throw ParseError(std::string("bad frame in transcript: ") + e.what(), pos + e.offset());
    }
    pos += len;
    r.round = r.message.round;
    t.append(std::move(r));
  }
  return t;
}

void Transcript::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write transcript " + path);
  const auto bytes = to_bytes();
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Transcript Transcript::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open transcript " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return from_bytes(bytes);
}

Bus::Bus(std::uint16_t party_count) : party_count_(party_count), inboxes_(party_count + 1u) {}

void Bus::send(std::uint16_t receiver, Message msg) {
  const std::uint16_t sender = msg.sender;
  if (receiver > party_count_ || sender > party_count_)
    throw DomainError("unknown bus endpoint");
  if ((sender == kArbitratorId) == (receiver == kArbitratorId))
    throw TopologyError("star topology: traffic must go through the arbitrator (" +
                        std::to_string(sender) + " -> " + std::to_string(receiver) + ")");
  auto frame = serialize(msg);
  std::lock_guard lock(mutex_);
  TranscriptRecord record{next_sequence_++, msg.round, sender, receiver, msg, std::move(frame)};
  transcript_.append(std::move(record));
  inboxes_[receiver].push_back(std::move(msg));
}

std::optional<Message> Bus::poll(std::uint16_t receiver) {
  if (receiver > party_count_) throw DomainError("unknown bus endpoint");
  std::lock_guard lock(mutex_);
  auto& inbox = inboxes_[receiver];
  if (inbox.empty()) return std::nullopt;
  Message m = std::move(inbox.front());
  inbox.pop_front();
  return m;
}

Transcript Bus::transcript() const {
  std::lock_guard lock(mutex_);
  return transcript_;
}

CostReport account(const Transcript& transcript, std::uint32_t first_round,
                   std::uint32_t last_round) {
  CostReport report;
  for (const auto& r : transcript.records()) {
    if (r.round < first_round || r.round > last_round) continue;
    TrafficCount one{1, r.message.payload.size(), r.frame.size()};
    auto add = [&](TrafficCount& into) {
      into.messages += one.messages;
      into.elements += one.elements;
      into.bytes += one.bytes;
    };
    const auto type = r.message.type;
    if (type == MessageType::kConverged || type == MessageType::kFinalShare) {
      add(report.control_total);
    } else {
      add(report.per_round[r.round]);
      add(report.iteration_total);
    }
    add(report.total);
  }
  return report;
}

}  // namespace seigen
