#include "seigen/message.hpp"

#include <bit>
#include <string>

#include "seigen/bigint.hpp"
#include "seigen/errors.hpp"

namespace seigen {

namespace {

constexpr std::uint8_t kMagic[4] = {0x45, 0x56, 0x50, 0x31};

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { be(v, 2); }
  void u32(std::uint32_t v) { be(v, 4); }
  void u64(std::uint64_t v) { be(v, 8); }
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void be(std::uint64_t v, int width) {
    for (int shift = 8 * (width - 1); shift >= 0; shift -= 8)
      out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}
  std::size_t offset() const { return pos_; }
  std::uint64_t be(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v = (v << 8) | bytes_[pos_++];
    return v;
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw ParseError("truncated frame", pos_);
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string_view to_string(MessageType type) {
  switch (type) {
    case MessageType::kShareVec: return "SHARE_VEC";
    case MessageType::kAggVec: return "AGG_VEC";
    case MessageType::kShareNorm: return "SHARE_NORM";
    case MessageType::kAggNorm: return "AGG_NORM";
    case MessageType::kConverged: return "CONVERGED";
    case MessageType::kFinalShare: return "FINAL_SHARE";
  }
  return "UNKNOWN";
}

Message Message::with_bigints(MessageType type, std::uint32_t session, std::uint32_t round,
                              std::uint16_t sender, std::vector<mpz_class> values) {
  Message m{type, session, round, sender, PayloadKind::kBigInt, {}};
  m.payload.reserve(values.size());
  for (auto& v : values) m.payload.emplace_back(std::move(v));
  return m;
}

Message Message::with_reals(MessageType type, std::uint32_t session, std::uint32_t round,
                            std::uint16_t sender, std::span<const double> values) {
  Message m{type, session, round, sender, PayloadKind::kReal, {}};
  m.payload.reserve(values.size());
  for (double v : values) m.payload.emplace_back(v);
  return m;
}

std::vector<mpz_class> Message::bigints() const {
  if (kind != PayloadKind::kBigInt) throw ProtocolError("expected big-integer payload");
  std::vector<mpz_class> out;
  out.reserve(payload.size());
  for (const auto& e : payload) out.push_back(std::get<mpz_class>(e));
  return out;
}

std::vector<double> Message::reals() const {
  if (kind != PayloadKind::kReal) throw ProtocolError("expected real payload");
  std::vector<double> out;
  out.reserve(payload.size());
  for (const auto& e : payload) out.push_back(std::get<double>(e));
  return out;
}

std::vector<std::uint8_t> serialize(const Message& msg) {
  const bool big = msg.kind == PayloadKind::kBigInt;
  for (const auto& e : msg.payload)
    if (std::holds_alternative<mpz_class>(e) != big)
      throw DomainError("message payload mixes element kinds");
  if (msg.type == MessageType::kConverged && !msg.payload.empty())
    throw DomainError("CONVERGED carries no payload");
  if ((msg.type == MessageType::kShareNorm || msg.type == MessageType::kAggNorm) &&
      msg.payload.size() != 1)
    throw DomainError("norm messages carry exactly one element");

  Writer w;
  w.bytes(kMagic);
  w.u8(static_cast<std::uint8_t>(msg.type));
  w.u32(msg.session_id);
  w.u32(msg.round);
  w.u16(msg.sender);
  w.u8(static_cast<std::uint8_t>(msg.kind));
  w.u32(static_cast<std::uint32_t>(msg.payload.size()));
  for (const auto& e : msg.payload) {
    if (big) {
      const auto& v = std::get<mpz_class>(e);
      if (v < 0) throw DomainError("negative big-integer element");
      const auto mag = to_bytes_be(v);
      w.u32(static_cast<std::uint32_t>(mag.size()));
      w.bytes(mag);
    } else {
      w.u64(std::bit_cast<std::uint64_t>(std::get<double>(e)));
    }
  }
  return w.take();
}

Message deserialize(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.take(4);
  for (int i = 0; i < 4; ++i)
    if (magic[i] != kMagic[i]) throw ParseError("bad magic", static_cast<std::size_t>(i));

  Message msg;
  const std::size_t type_at = r.offset();
  const auto type = static_cast<std::uint8_t>(r.be(1));
  if (type < 1 || type > 6) throw ParseError("unknown message type", type_at);
  msg.type = static_cast<MessageType>(type);
  msg.session_id = static_cast<std::uint32_t>(r.be(4));
  msg.round = static_cast<std::uint32_t>(r.be(4));
  msg.sender = static_cast<std::uint16_t>(r.be(2));
  const std::size_t kind_at = r.offset();
  const auto kind = static_cast<std::uint8_t>(r.be(1));
  if (kind != 1 && kind != 2) throw ParseError("unknown payload kind", kind_at);
  msg.kind = static_cast<PayloadKind>(kind);
  const std::size_t count_at = r.offset();
  const auto count = static_cast<std::uint32_t>(r.be(4));
  // Every element needs at least four bytes, which bounds the reservation.
  if (count > (bytes.size() - r.offset()) / 4) throw ParseError("truncated payload", count_at);
  msg.payload.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    if (msg.kind == PayloadKind::kBigInt) {
      const auto len = static_cast<std::uint32_t>(r.be(4));
      const std::size_t at = r.offset();
      const auto mag = r.take(len);
      if (len > 0 && mag[0] == 0) throw ParseError("non-canonical leading zero", at);
      msg.payload.emplace_back(from_bytes_be(mag));
    } else {
      msg.payload.emplace_back(std::bit_cast<double>(r.be(8)));
    }
  }
  if (!r.done()) throw ParseError("trailing bytes after frame", r.offset());
  return msg;
}

}  // namespace seigen
