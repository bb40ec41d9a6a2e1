// On-air layout of a data packet and its CRC-16 checksum.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "qqmr/queues.hpp"

namespace qqmr {

/// Wire layout, big-endian:
///   header(16) type(8, low two bits used) src(8) dst(8) timestamp_ms(32)
///   payload_len(16) payload(payload_len bytes) crc(16)
/// The CRC covers every byte before it.
struct DataPacket {
  std::uint16_t header = 0;
  PacketType packet_type = PacketType::normal;
  std::uint8_t source_id = 0;
  std::uint8_t destination_id = 0;
  std::uint32_t timestamp_ms = 0;
  std::vector<std::uint8_t> payload;
  std::uint16_t checksum = 0;

  friend bool operator==(const DataPacket&, const DataPacket&) = default;
};

class FrameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kFrameOverheadBytes = 2 + 1 + 1 + 1 + 4 + 2 + 2;

constexpr std::size_t framed_size(std::size_t payload_bytes) {
  return kFrameOverheadBytes + payload_bytes;
}

/// CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF, no reflection, no xorout).
std::uint16_t compute_checksum(std::span<const std::uint8_t> bytes);

/// Serializes every field except the trailing checksum.
std::vector<std::uint8_t> encode_body(const DataPacket& packet);

/// Serializes the packet with a freshly computed checksum and stores that
/// checksum back into `packet`.
std::vector<std::uint8_t> seal(DataPacket& packet);

/// Serializes the packet as-is, including whatever checksum it carries.
std::vector<std::uint8_t> encode(const DataPacket& packet);

/// Parses a frame. Throws FrameError on truncation, a bad type code or a
/// length mismatch; does not check the CRC.
DataPacket decode(std::span<const std::uint8_t> frame);

enum class ChecksumStatus : std::uint8_t { ok, corrupt };

/// Recomputes the CRC over all but the last two bytes and compares.
ChecksumStatus verify_checksum(std::span<const std::uint8_t> frame);

}  // namespace qqmr
