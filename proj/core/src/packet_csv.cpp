#include "driftstream/packet_csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "driftstream/error.hpp"

namespace driftstream {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

template <typename T>
T parse_int(const std::string& s, std::size_t row, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw UnparsableRow(row, std::string("bad ") + what + " '" + s + "'");
  return value;
}

Protocol parse_protocol(const std::string& s, std::size_t row) {
  if (s == "TCP") return Protocol::TCP;
  if (s == "UDP") return Protocol::UDP;
  if (s == "ICMP") return Protocol::ICMP;
  if (s == "OTHER") return Protocol::OTHER;
  throw UnparsableRow(row, "bad protocol '" + s + "'");
}

}  // namespace

std::vector<PacketRecord> read_packet_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaMismatch("empty file, header expected");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kPacketCsvHeader)
    throw SchemaMismatch("header does not match canonical packet schema");

  std::vector<PacketRecord> packets;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++row;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 10)
      throw UnparsableRow(row, "expected 10 columns, got " +
                                   std::to_string(fields.size()));
    PacketRecord rec;
    rec.timestamp_us = parse_int<std::int64_t>(fields[0], row, "timestamp_us");
    try {
      rec.src_ip = ipv4_from_string(fields[1]);
      rec.dst_ip = ipv4_from_string(fields[2]);
    } catch (const Error& e) {
      throw UnparsableRow(row, e.what());
    }
    rec.src_port = parse_int<std::uint16_t>(fields[3], row, "src_port");
    rec.dst_port = parse_int<std::uint16_t>(fields[4], row, "dst_port");
    rec.protocol = parse_protocol(fields[5], row);
    rec.frame_len = parse_int<std::uint32_t>(fields[6], row, "frame_len");
    rec.payload_len = parse_int<std::uint32_t>(fields[7], row, "payload_len");
    std::uint32_t flags = parse_int<std::uint32_t>(fields[8], row, "tcp_flags");
    if (flags > 255) throw UnparsableRow(row, "tcp_flags out of range");
    rec.tcp_flags = static_cast<std::uint8_t>(flags);
    if (fields[9] == "benign") {
      rec.label = Label::benign;
    } else if (fields[9] == "malicious") {
      rec.label = Label::malicious;
    } else if (fields[9].empty()) {
      rec.label = std::nullopt;
    } else {
      throw UnparsableRow(row, "bad label '" + fields[9] + "'");
    }
    if (rec.payload_len > rec.frame_len)
      throw UnparsableRow(row, "payload_len exceeds frame_len");
    packets.push_back(rec);
  }

  std::stable_sort(packets.begin(), packets.end(),
                   [](const PacketRecord& a, const PacketRecord& b) {
                     return a.timestamp_us < b.timestamp_us;
                   });
  return packets;
}

std::vector<PacketRecord> read_packet_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open packet CSV: " + path.string());
  return read_packet_csv(in);
}

void write_packet_csv(std::ostream& out,
                      const std::vector<PacketRecord>& packets) {
  out << kPacketCsvHeader << '\n';
  for (const auto& p : packets) {
    out << p.timestamp_us << ',' << ipv4_to_string(p.src_ip) << ','
        << ipv4_to_string(p.dst_ip) << ',' << p.src_port << ',' << p.dst_port
        << ',' << to_string(p.protocol) << ',' << p.frame_len << ','
        << p.payload_len << ',' << static_cast<unsigned>(p.tcp_flags) << ',';
    if (p.label) out << to_string(*p.label);
    out << '\n';
  }
}

void write_packet_csv(const std::filesystem::path& path,
                      const std::vector<PacketRecord>& packets) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write packet CSV: " + path.string());
  write_packet_csv(out, packets);
}

}  // namespace driftstream
