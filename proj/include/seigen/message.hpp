#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <gmpxx.h>

namespace seigen {

enum class MessageType : std::uint8_t {
  kShareVec = 1,
  kAggVec = 2,
  kShareNorm = 3,
  kAggNorm = 4,
  kConverged = 5,
  kFinalShare = 6,
};

enum class PayloadKind : std::uint8_t { kBigInt = 1, kReal = 2 };

std::string_view to_string(MessageType type);

using Element = std::variant<mpz_class, double>;

inline constexpr std::uint16_t kArbitratorId = 0;

struct Message {
  MessageType type = MessageType::kConverged;
  std::uint32_t session_id = 0;
  std::uint32_t round = 0;
  std::uint16_t sender = 0;
  PayloadKind kind = PayloadKind::kReal;
  std::vector<Element> payload;

  static Message with_bigints(MessageType type, std::uint32_t session, std::uint32_t round,
                              std::uint16_t sender, std::vector<mpz_class> values);
  static Message with_reals(MessageType type, std::uint32_t session, std::uint32_t round,
                            std::uint16_t sender, std::span<const double> values);

  // Typed payload views; throw ProtocolError on a kind mismatch.
  std::vector<mpz_class> bigints() const;
  std::vector<double> reals() const;

  bool operator==(const Message&) const = default;
};

// Frame layout, all integers big-endian:
//   magic "EVP1" | u8 type | u32 session | u32 round | u16 sender |
//   u8 payload kind | u32 count | elements
// big-integer element: u32 length | magnitude bytes (no leading zero)
// real element: IEEE-754 binary64
inline constexpr std::size_t kFrameHeaderSize = 20;

std::vector<std::uint8_t> serialize(const Message& msg);
Message deserialize(std::span<const std::uint8_t> bytes);

}  // namespace seigen
