#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "driftstream/packet.hpp"

namespace driftstream {

/// Canonical packet CSV column layout. The header must match bit-exactly.
inline constexpr const char* kPacketCsvHeader =
    "timestamp_us,src_ip,dst_ip,src_port,dst_port,protocol,frame_len,"
    "payload_len,tcp_flags,label";

/// Reads the canonical packet CSV. Rows are returned sorted by
/// timestamp_us. Throws SchemaMismatch when the header row is wrong and
/// UnparsableRow (with the 1-based data row index) for bad rows.
std::vector<PacketRecord> read_packet_csv(const std::filesystem::path& path);
std::vector<PacketRecord> read_packet_csv(std::istream& in);

void write_packet_csv(const std::filesystem::path& path,
                      const std::vector<PacketRecord>& packets);
void write_packet_csv(std::ostream& out,
                      const std::vector<PacketRecord>& packets);

}  // namespace driftstream
