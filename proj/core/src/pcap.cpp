#include "driftstream/pcap.hpp"

#include <algorithm>
#include <array>
#include <cstring>

#include "driftstream/error.hpp"

namespace driftstream {

namespace {

constexpr std::uint32_t kMagicNative = 0xA1B2C3D4;
constexpr std::uint32_t kMagicSwapped = 0xD4C3B2A1;
constexpr std::uint32_t kLinkTypeEthernet = 1;

constexpr std::size_t kGlobalHeaderLen = 24;
constexpr std::size_t kRecordHeaderLen = 16;
constexpr std::size_t kEthernetHeaderLen = 14;

std::uint32_t load_u32(const unsigned char* p, bool swap) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  if (swap) v = __builtin_bswap32(v);
  return v;
}

std::uint16_t load_be16(const unsigned char* p) {
  return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

}  // namespace

PcapReader::PcapReader(const std::filesystem::path& path)
    : file_(path, std::ios::binary) {
  if (!file_) throw Error("cannot open pcap file: " + path.string());

  std::array<unsigned char, kGlobalHeaderLen> header{};
  file_.read(reinterpret_cast<char*>(header.data()), header.size());
  if (file_.gcount() < static_cast<std::streamsize>(header.size()))
    throw BadMagic("file shorter than pcap global header");

  std::uint32_t magic = load_u32(header.data(), false);
  if (magic == kMagicNative) {
    swap_ = false;
  } else if (magic == kMagicSwapped) {
    swap_ = true;
  } else {
    throw BadMagic("not a classic pcap file");
  }

  std::uint32_t link_type = load_u32(header.data() + 20, swap_);
  if (link_type != kLinkTypeEthernet)
    throw UnsupportedLinkType("link type " + std::to_string(link_type) +
                              " (only Ethernet is supported)");
}

std::uint32_t PcapReader::read_u32(const unsigned char* p) const {
  return load_u32(p, swap_);
}

std::uint16_t PcapReader::read_u16(const unsigned char* p) const {
  std::uint16_t v;
  std::memcpy(&v, p, 2);
  if (swap_) v = static_cast<std::uint16_t>((v >> 8) | (v << 8));
  return v;
}

std::optional<PacketRecord> PcapReader::next() {
  std::array<unsigned char, kRecordHeaderLen> rec{};
  std::vector<unsigned char> data;

  for (;;) {
    file_.read(reinterpret_cast<char*>(rec.data()), rec.size());
    if (file_.gcount() == 0) return std::nullopt;  // clean end of file
    if (file_.gcount() < static_cast<std::streamsize>(rec.size()))
      throw TruncatedPacket("record header cut short");

    std::uint32_t ts_sec = read_u32(rec.data());
    std::uint32_t ts_usec = read_u32(rec.data() + 4);
    std::uint32_t incl_len = read_u32(rec.data() + 8);
    std::uint32_t orig_len = read_u32(rec.data() + 12);

    data.resize(incl_len);
    file_.read(reinterpret_cast<char*>(data.data()), incl_len);
    if (file_.gcount() < static_cast<std::streamsize>(incl_len))
      throw TruncatedPacket("record promises " + std::to_string(incl_len) +
                            " bytes, file ends early");

    if (data.size() < kEthernetHeaderLen) {
      ++stats_.skipped_malformed;
      continue;
    }
    std::uint16_t ethertype = load_be16(data.data() + 12);
    if (ethertype != 0x0800) {  // not IPv4
      ++stats_.skipped_non_ipv4;
      continue;
    }

    const unsigned char* ip = data.data() + kEthernetHeaderLen;
    std::size_t ip_avail = data.size() - kEthernetHeaderLen;
    if (ip_avail < 20) {
      ++stats_.skipped_malformed;
      continue;
    }
    std::uint8_t version = ip[0] >> 4;
    std::size_t ihl = static_cast<std::size_t>(ip[0] & 0x0F) * 4;
    if (version != 4 || ihl < 20 || ip_avail < ihl) {
      ++stats_.skipped_malformed;
      continue;
    }
    std::uint16_t total_len = load_be16(ip + 2);
    if (total_len < ihl) {
      ++stats_.skipped_malformed;
      continue;
    }

    PacketRecord out;
    out.timestamp_us =
        static_cast<std::int64_t>(ts_sec) * 1000000 + static_cast<std::int64_t>(ts_usec);
    out.frame_len = orig_len;
    out.src_ip = static_cast<std::uint32_t>(ip[12]) << 24 |
                 static_cast<std::uint32_t>(ip[13]) << 16 |
                 static_cast<std::uint32_t>(ip[14]) << 8 | ip[15];
    out.dst_ip = static_cast<std::uint32_t>(ip[16]) << 24 |
                 static_cast<std::uint32_t>(ip[17]) << 16 |
                 static_cast<std::uint32_t>(ip[18]) << 8 | ip[19];

    const unsigned char* l4 = ip + ihl;
    std::size_t l4_avail = ip_avail - ihl;
    std::size_t ip_payload = total_len - ihl;
    std::uint8_t proto = ip[9];

    if (proto == 6) {  // TCP
      if (l4_avail < 14) {
        ++stats_.skipped_malformed;
        continue;
      }
      out.protocol = Protocol::TCP;
      out.src_port = load_be16(l4);
      out.dst_port = load_be16(l4 + 2);
      std::size_t data_offset = static_cast<std::size_t>(l4[12] >> 4) * 4;
      out.tcp_flags = l4[13];
      out.payload_len = ip_payload > data_offset
                            ? static_cast<std::uint32_t>(ip_payload - data_offset)
                            : 0;
    } else if (proto == 17) {  // UDP
      if (l4_avail < 8) {
        ++stats_.skipped_malformed;
        continue;
      }
      out.protocol = Protocol::UDP;
      out.src_port = load_be16(l4);
      out.dst_port = load_be16(l4 + 2);
      std::uint16_t udp_len = load_be16(l4 + 4);
      out.payload_len = udp_len > 8 ? static_cast<std::uint32_t>(udp_len - 8) : 0;
    } else if (proto == 1) {  // ICMP
      if (l4_avail < 4) {
        ++stats_.skipped_malformed;
        continue;
      }
      out.protocol = Protocol::ICMP;
      out.payload_len =
          ip_payload > 8 ? static_cast<std::uint32_t>(ip_payload - 8) : 0;
    } else {
      ++stats_.skipped_non_transport;
      continue;
    }

    // Header fields can lie; the emitted record must still satisfy the
    // payload_len <= frame_len invariant for arbitrary input bytes.
    out.payload_len = std::min(out.payload_len, out.frame_len);

    ++stats_.packets_emitted;
    return out;
  }
}

std::vector<PacketRecord> read_pcap(const std::filesystem::path& path,
                                    IngestStats* stats) {
  PcapReader reader(path);
  std::vector<PacketRecord> packets;
  while (auto rec = reader.next()) packets.push_back(*rec);
  if (stats) *stats = reader.stats();

  std::stable_sort(packets.begin(), packets.end(),
                   [](const PacketRecord& a, const PacketRecord& b) {
                     return a.timestamp_us < b.timestamp_us;
                   });
  if (!packets.empty()) {
    std::int64_t t0 = packets.front().timestamp_us;
    for (auto& p : packets) p.timestamp_us -= t0;
  }
  return packets;
}

std::vector<std::uint8_t> write_pcap_bytes(
    const std::vector<PacketRecord>& packets) {
  std::vector<std::uint8_t> out;
  auto push_u32 = [&out](std::uint32_t v) {
    out.push_back(v & 0xFF);
    out.push_back((v >> 8) & 0xFF);
    out.push_back((v >> 16) & 0xFF);
    out.push_back((v >> 24) & 0xFF);
  };
  auto push_u16be = [&out](std::uint16_t v) {
    out.push_back((v >> 8) & 0xFF);
    out.push_back(v & 0xFF);
  };
  auto push_u32be = [&out](std::uint32_t v) {
    out.push_back((v >> 24) & 0xFF);
    out.push_back((v >> 16) & 0xFF);
    out.push_back((v >> 8) & 0xFF);
    out.push_back(v & 0xFF);
  };

  push_u32(kMagicNative);
  out.push_back(2); out.push_back(0);  // version 2.4
  out.push_back(4); out.push_back(0);
  push_u32(0);      // thiszone
  push_u32(0);      // sigfigs
  push_u32(65535);  // snaplen
  push_u32(kLinkTypeEthernet);

  for (const auto& p : packets) {
    bool tcp = p.protocol == Protocol::TCP;
    bool udp = p.protocol == Protocol::UDP;
    std::size_t l4_len = tcp ? 20 + p.payload_len
                        : udp ? 8 + p.payload_len
                              : 8 + p.payload_len;  // ICMP
    std::size_t ip_len = 20 + l4_len;
    std::size_t frame = kEthernetHeaderLen + ip_len;

    push_u32(static_cast<std::uint32_t>(p.timestamp_us / 1000000));
    push_u32(static_cast<std::uint32_t>(p.timestamp_us % 1000000));
    push_u32(static_cast<std::uint32_t>(frame));  // incl_len
    push_u32(static_cast<std::uint32_t>(frame));  // orig_len

    // Ethernet: zero MACs, IPv4 ethertype.
    for (int i = 0; i < 12; ++i) out.push_back(0);
    push_u16be(0x0800);

    out.push_back(0x45);  // version 4, IHL 5
    out.push_back(0);
    push_u16be(static_cast<std::uint16_t>(ip_len));
    push_u16be(0);  // id
    push_u16be(0);  // flags/fragment
    out.push_back(64);  // TTL
    out.push_back(tcp ? 6 : udp ? 17 : 1);
    push_u16be(0);  // checksum (not validated by the reader)
    push_u32be(p.src_ip);
    push_u32be(p.dst_ip);

    if (tcp) {
      push_u16be(p.src_port);
      push_u16be(p.dst_port);
      push_u32be(0);  // seq
      push_u32be(0);  // ack
      out.push_back(5 << 4);  // data offset 5 words
      out.push_back(p.tcp_flags);
      push_u16be(0);  // window
      push_u16be(0);  // checksum
      push_u16be(0);  // urgent
    } else if (udp) {
      push_u16be(p.src_port);
      push_u16be(p.dst_port);
      push_u16be(static_cast<std::uint16_t>(8 + p.payload_len));
      push_u16be(0);
    } else {
      out.push_back(8);  // echo request
      out.push_back(0);
      push_u16be(0);
      push_u32be(0);
    }
    for (std::uint32_t i = 0; i < p.payload_len; ++i) out.push_back(0);
  }
  return out;
}

}  // namespace driftstream
