#include "qqmr/frame.hpp"

#include <boost/crc.hpp>
#include <limits>

namespace qqmr {

namespace {

using Crc16CcittFalse = boost::crc_optimal<16, 0x1021, 0xFFFF, 0, false, false>;

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint16_t get16(std::span<const std::uint8_t> in, std::size_t at) {
  return static_cast<std::uint16_t>((in[at] << 8) | in[at + 1]);
}

std::uint32_t get32(std::span<const std::uint8_t> in, std::size_t at) {
  return (std::uint32_t{in[at]} << 24) | (std::uint32_t{in[at + 1]} << 16) |
         (std::uint32_t{in[at + 2]} << 8) | std::uint32_t{in[at + 3]};
}

}  // namespace

std::uint16_t compute_checksum(std::span<const std::uint8_t> bytes) {
  Crc16CcittFalse crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return static_cast<std::uint16_t>(crc.checksum());
}

std::vector<std::uint8_t> encode_body(const DataPacket& packet) {
  if (packet.payload.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw FrameError("payload longer than 65535 bytes");
  }
  std::vector<std::uint8_t> out;
  out.reserve(framed_size(packet.payload.size()));
  put16(out, packet.header);
  out.push_back(static_cast<std::uint8_t>(packet.packet_type));
  out.push_back(packet.source_id);
  out.push_back(packet.destination_id);
  put32(out, packet.timestamp_ms);
  put16(out, static_cast<std::uint16_t>(packet.payload.size()));
  out.insert(out.end(), packet.payload.begin(), packet.payload.end());
  return out;
}

std::vector<std::uint8_t> seal(DataPacket& packet) {
  std::vector<std::uint8_t> out = encode_body(packet);
  packet.checksum = compute_checksum(out);
  put16(out, packet.checksum);
  return out;
}

std::vector<std::uint8_t> encode(const DataPacket& packet) {
  std::vector<std::uint8_t> out = encode_body(packet);
  put16(out, packet.checksum);
  return out;
}

DataPacket decode(std::span<const std::uint8_t> frame) {
  if (frame.size() < kFrameOverheadBytes) throw FrameError("frame shorter than its fixed fields");
  DataPacket p;
  p.header = get16(frame, 0);
  const std::uint8_t type = frame[2];
  if (type > 0b10) throw FrameError("invalid packet type code");
  p.packet_type = static_cast<PacketType>(type);
  p.source_id = frame[3];
  p.destination_id = frame[4];
  p.timestamp_ms = get32(frame, 5);
  const std::size_t length = get16(frame, 9);
  if (frame.size() != framed_size(length)) throw FrameError("payload length mismatch");
  p.payload.assign(frame.begin() + 11, frame.begin() + 11 + static_cast<std::ptrdiff_t>(length));
  p.checksum = get16(frame, frame.size() - 2);
  return p;
}

ChecksumStatus verify_checksum(std::span<const std::uint8_t> frame) {
  if (frame.size() < 2) return ChecksumStatus::corrupt;
  const auto body = frame.first(frame.size() - 2);
  const std::uint16_t stored = get16(frame, frame.size() - 2);
  return compute_checksum(body) == stored ? ChecksumStatus::ok : ChecksumStatus::corrupt;
}

}  // namespace qqmr
