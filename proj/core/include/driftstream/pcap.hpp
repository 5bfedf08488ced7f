#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <vector>

#include "driftstream/packet.hpp"

namespace driftstream {

/// Counters kept while reading a capture.
struct IngestStats {
  std::uint64_t packets_emitted = 0;
  std::uint64_t skipped_non_ipv4 = 0;   // ARP, IPv6, VLAN, ...
  std::uint64_t skipped_non_transport = 0;  // IPv4 but not TCP/UDP/ICMP
  std::uint64_t skipped_malformed = 0;  // capture too short to parse headers

  std::uint64_t total_skipped() const {
    return skipped_non_ipv4 + skipped_non_transport + skipped_malformed;
  }
};

/// Streaming reader for classic pcap files (link type Ethernet). One
/// instance is a single-consumer iterator; independent instances may read
/// different files concurrently.
class PcapReader {
 public:
  explicit PcapReader(const std::filesystem::path& path);

  /// Next IPv4 TCP/UDP/ICMP packet, or nullopt at end of file. Timestamps
  /// are raw (not yet normalized). Throws TruncatedPacket when a record
  /// header promises more bytes than remain in the file.
  std::optional<PacketRecord> next();

  const IngestStats& stats() const { return stats_; }

 private:
  std::ifstream file_;
  bool swap_ = false;  // file endianness differs from host
  IngestStats stats_;

  std::uint32_t read_u32(const unsigned char* p) const;
  std::uint16_t read_u16(const unsigned char* p) const;
};

/// Reads a whole capture: one PacketRecord per IPv4 TCP/UDP/ICMP packet,
/// sorted by timestamp and normalized so the first packet is t=0.
std::vector<PacketRecord> read_pcap(const std::filesystem::path& path,
                                    IngestStats* stats = nullptr);

/// Serializes records to classic pcap bytes (microsecond magic, Ethernet).
/// Used to build fixtures and to round-trip small captures in tests.
std::vector<std::uint8_t> write_pcap_bytes(
    const std::vector<PacketRecord>& packets);

}  // namespace driftstream
