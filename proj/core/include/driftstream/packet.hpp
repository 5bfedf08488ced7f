#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "driftstream/error.hpp"

namespace driftstream {

enum class Protocol : std::uint8_t { TCP, UDP, ICMP, OTHER };

enum class Label : std::uint8_t { benign = 0, malicious = 1 };

inline const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::TCP: return "TCP";
    case Protocol::UDP: return "UDP";
    case Protocol::ICMP: return "ICMP";
    default: return "OTHER";
  }
}

inline const char* to_string(Label l) {
  return l == Label::malicious ? "malicious" : "benign";
}

// TCP flag bits as they appear in the TCP header flags octet.
namespace tcp_flags {
constexpr std::uint8_t fin = 0x01;
constexpr std::uint8_t syn = 0x02;
constexpr std::uint8_t rst = 0x04;
constexpr std::uint8_t psh = 0x08;
constexpr std::uint8_t ack = 0x10;
constexpr std::uint8_t urg = 0x20;
}  // namespace tcp_flags

/// One captured packet after ingest normalization. Timestamps are
/// microseconds relative to the first packet of the stream.
struct PacketRecord {
  std::int64_t timestamp_us = 0;
  std::uint32_t src_ip = 0;   // host byte order
  std::uint32_t dst_ip = 0;   // host byte order
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  Protocol protocol = Protocol::OTHER;
  std::uint32_t frame_len = 0;    // original frame length on the wire
  std::uint32_t payload_len = 0;  // transport payload bytes, <= frame_len
  std::uint8_t tcp_flags = 0;     // 0 for non-TCP
  std::optional<Label> label;

  bool operator==(const PacketRecord&) const = default;
};

inline std::string ipv4_to_string(std::uint32_t ip) {
  return std::to_string(ip >> 24) + "." + std::to_string((ip >> 16) & 255) +
         "." + std::to_string((ip >> 8) & 255) + "." + std::to_string(ip & 255);
}

inline std::uint32_t ipv4_from_string(const std::string& s) {
  std::uint32_t result = 0;
  std::uint32_t octet = 0;
  int dots = 0;
  bool digit_seen = false;
  for (char c : s) {
    if (c == '.') {
      if (!digit_seen) throw Error("bad IPv4 address: " + s);
      result = (result << 8) | octet;
      octet = 0;
      digit_seen = false;
      if (++dots > 3) throw Error("bad IPv4 address: " + s);
    } else if (c >= '0' && c <= '9') {
      octet = octet * 10 + static_cast<std::uint32_t>(c - '0');
      if (octet > 255) throw Error("bad IPv4 address: " + s);
      digit_seen = true;
    } else {
      throw Error("bad IPv4 address: " + s);
    }
  }
  if (dots != 3 || !digit_seen) throw Error("bad IPv4 address: " + s);
  return (result << 8) | octet;
}

}  // namespace driftstream
