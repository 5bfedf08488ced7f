#include "driftstream/pcap.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "driftstream/error.hpp"
#include "driftstream/rng.hpp"

using namespace driftstream;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("driftstream_pcap_" + name);
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

void push_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(v & 0xFF);
  out.push_back((v >> 8) & 0xFF);
  out.push_back((v >> 16) & 0xFF);
  out.push_back((v >> 24) & 0xFF);
}

void push_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back((v >> 24) & 0xFF);
  out.push_back((v >> 16) & 0xFF);
  out.push_back((v >> 8) & 0xFF);
  out.push_back(v & 0xFF);
}

std::vector<std::uint8_t> global_header(bool swapped) {
  std::vector<std::uint8_t> out;
  auto push32 = [&](std::uint32_t v) {
    swapped ? push_u32be(out, v) : push_u32le(out, v);
  };
  push32(0xA1B2C3D4);
  if (swapped) {
    out.push_back(0); out.push_back(2);
    out.push_back(0); out.push_back(4);
  } else {
    out.push_back(2); out.push_back(0);
    out.push_back(4); out.push_back(0);
  }
  push32(0);
  push32(0);
  push32(65535);
  push32(1);  // Ethernet
  return out;
}

// Hand-assembled frames: two TCP packets plus one ARP.
std::vector<std::uint8_t> tcp_frame(std::uint32_t src_ip, std::uint32_t dst_ip,
                                    std::uint16_t src_port,
                                    std::uint16_t dst_port,
                                    std::uint8_t flags,
                                    std::size_t payload) {
  std::vector<std::uint8_t> f;
  for (int i = 0; i < 12; ++i) f.push_back(0);
  f.push_back(0x08); f.push_back(0x00);  // IPv4
  std::size_t ip_len = 20 + 20 + payload;
  f.push_back(0x45); f.push_back(0);
  f.push_back((ip_len >> 8) & 0xFF); f.push_back(ip_len & 0xFF);
  for (int i = 0; i < 4; ++i) f.push_back(0);  // id, frag
  f.push_back(64); f.push_back(6);             // TTL, TCP
  f.push_back(0); f.push_back(0);              // checksum
  push_u32be(f, src_ip);
  push_u32be(f, dst_ip);
  f.push_back(src_port >> 8); f.push_back(src_port & 0xFF);
  f.push_back(dst_port >> 8); f.push_back(dst_port & 0xFF);
  for (int i = 0; i < 8; ++i) f.push_back(0);  // seq, ack
  f.push_back(5 << 4);  // data offset
  f.push_back(flags);
  for (int i = 0; i < 4; ++i) f.push_back(0);  // window, checksum
  f.push_back(0); f.push_back(0);              // urgent
  for (std::size_t i = 0; i < payload; ++i) f.push_back(0xAB);
  return f;
}

std::vector<std::uint8_t> arp_frame() {
  std::vector<std::uint8_t> f;
  for (int i = 0; i < 12; ++i) f.push_back(0);
  f.push_back(0x08); f.push_back(0x06);  // ARP
  for (int i = 0; i < 28; ++i) f.push_back(0);
  return f;
}

void append_record(std::vector<std::uint8_t>& file, bool swapped,
                   std::uint32_t ts_sec, std::uint32_t ts_usec,
                   const std::vector<std::uint8_t>& frame) {
  auto push32 = [&](std::uint32_t v) {
    swapped ? push_u32be(file, v) : push_u32le(file, v);
  };
  push32(ts_sec);
  push32(ts_usec);
  push32(static_cast<std::uint32_t>(frame.size()));
  push32(static_cast<std::uint32_t>(frame.size()));
  file.insert(file.end(), frame.begin(), frame.end());
}

std::vector<std::uint8_t> three_packet_capture(bool swapped) {
  auto file = global_header(swapped);
  append_record(file, swapped, 100, 500,
                tcp_frame(0x0A000001, 0x0A000002, 1234, 80, 0x02, 10));
  append_record(file, swapped, 100, 900, arp_frame());
  append_record(file, swapped, 101, 200,
                tcp_frame(0x0A000002, 0x0A000001, 80, 1234, 0x12, 0));
  return file;
}

}  // namespace

TEST(PcapReader, ParsesCraftedThreePacketCapture) {
  auto path = temp_file("three.pcap");
  write_bytes(path, three_packet_capture(false));

  IngestStats stats;
  auto packets = read_pcap(path, &stats);
  ASSERT_EQ(packets.size(), 2u);
  EXPECT_EQ(stats.skipped_non_ipv4, 1u);

  EXPECT_EQ(packets[0].timestamp_us, 0);  // normalized to t = 0
  EXPECT_EQ(packets[0].src_ip, 0x0A000001u);
  EXPECT_EQ(packets[0].dst_ip, 0x0A000002u);
  EXPECT_EQ(packets[0].src_port, 1234);
  EXPECT_EQ(packets[0].dst_port, 80);
  EXPECT_EQ(packets[0].protocol, Protocol::TCP);
  EXPECT_EQ(packets[0].tcp_flags, 0x02);
  EXPECT_EQ(packets[0].payload_len, 10u);
  EXPECT_EQ(packets[0].frame_len, 14u + 20 + 20 + 10);

  EXPECT_EQ(packets[1].timestamp_us, 999700);  // 101.2s - 100.0005s
  EXPECT_EQ(packets[1].src_port, 80);
  EXPECT_EQ(packets[1].dst_port, 1234);
  EXPECT_EQ(packets[1].payload_len, 0u);
  EXPECT_FALSE(packets[1].label.has_value());
}

TEST(PcapReader, ByteSwappedMagicParsesIdentically) {
  auto native = temp_file("native.pcap");
  auto swapped = temp_file("swapped.pcap");
  write_bytes(native, three_packet_capture(false));
  write_bytes(swapped, three_packet_capture(true));

  auto a = read_pcap(native);
  auto b = read_pcap(swapped);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(PcapReader, EmptyCaptureYieldsNoPackets) {
  auto path = temp_file("empty.pcap");
  write_bytes(path, global_header(false));
  IngestStats stats;
  auto packets = read_pcap(path, &stats);
  EXPECT_TRUE(packets.empty());
  EXPECT_EQ(stats.packets_emitted, 0u);
}

TEST(PcapReader, BadMagicRejected) {
  auto path = temp_file("badmagic.pcap");
  std::vector<std::uint8_t> bytes;
  push_u32le(bytes, 0xDEADBEEF);
  bytes.resize(24, 0);
  write_bytes(path, bytes);
  EXPECT_THROW(PcapReader{path}, BadMagic);
}

TEST(PcapReader, ShortHeaderRejected) {
  auto path = temp_file("short.pcap");
  write_bytes(path, {0xD4, 0xC3});
  EXPECT_THROW(PcapReader{path}, BadMagic);
}

TEST(PcapReader, UnsupportedLinkTypeRejected) {
  auto path = temp_file("linktype.pcap");
  auto bytes = global_header(false);
  bytes[20] = 101;  // raw IP instead of Ethernet
  write_bytes(path, bytes);
  EXPECT_THROW(PcapReader{path}, UnsupportedLinkType);
}

TEST(PcapReader, TruncatedPacketRejected) {
  auto path = temp_file("truncated.pcap");
  auto file = global_header(false);
  auto frame = tcp_frame(1, 2, 3, 4, 0, 100);
  push_u32le(file, 0);
  push_u32le(file, 0);
  push_u32le(file, static_cast<std::uint32_t>(frame.size() + 50));  // lies
  push_u32le(file, static_cast<std::uint32_t>(frame.size() + 50));
  file.insert(file.end(), frame.begin(), frame.end());
  write_bytes(path, file);

  PcapReader reader(path);
  EXPECT_THROW(reader.next(), TruncatedPacket);
}

TEST(PcapReader, RoundTripThroughWriter) {
  std::vector<PacketRecord> packets;
  Rng rng(77);
  for (int i = 0; i < 40; ++i) {
    PacketRecord p;
    p.timestamp_us = i * 250;
    p.src_ip = static_cast<std::uint32_t>(rng.next());
    p.dst_ip = static_cast<std::uint32_t>(rng.next());
    p.src_port = static_cast<std::uint16_t>(rng.bounded(65536));
    p.dst_port = static_cast<std::uint16_t>(rng.bounded(65536));
    int proto = static_cast<int>(rng.bounded(3));
    p.protocol = proto == 0 ? Protocol::TCP
               : proto == 1 ? Protocol::UDP
                            : Protocol::ICMP;
    p.payload_len = static_cast<std::uint32_t>(rng.bounded(200));
    p.tcp_flags = p.protocol == Protocol::TCP
                      ? static_cast<std::uint8_t>(rng.bounded(64))
                      : 0;
    packets.push_back(p);
  }
  auto path = temp_file("roundtrip.pcap");
  write_bytes(path, write_pcap_bytes(packets));
  auto parsed = read_pcap(path);
  ASSERT_EQ(parsed.size(), packets.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    EXPECT_EQ(parsed[i].timestamp_us, packets[i].timestamp_us);
    EXPECT_EQ(parsed[i].src_ip, packets[i].src_ip);
    EXPECT_EQ(parsed[i].dst_ip, packets[i].dst_ip);
    EXPECT_EQ(parsed[i].src_port, packets[i].src_port);
    EXPECT_EQ(parsed[i].dst_port, packets[i].dst_port);
    EXPECT_EQ(parsed[i].protocol, packets[i].protocol);
    EXPECT_EQ(parsed[i].payload_len, packets[i].payload_len);
    EXPECT_EQ(parsed[i].tcp_flags, packets[i].tcp_flags);
  }
}

// Fuzz property: arbitrary record contents never produce a record with
// payload_len > frame_len, and the reader never reads out of bounds.
TEST(PcapReader, FuzzedBodiesKeepPayloadInvariant) {
  Rng rng(2024);
  for (int iter = 0; iter < 300; ++iter) {
    auto file = global_header(false);
    std::size_t records = 1 + rng.bounded(5);
    for (std::size_t r = 0; r < records; ++r) {
      std::size_t len = rng.bounded(120);
      push_u32le(file, static_cast<std::uint32_t>(rng.bounded(1000)));
      push_u32le(file, static_cast<std::uint32_t>(rng.bounded(1000000)));
      push_u32le(file, static_cast<std::uint32_t>(len));
      push_u32le(file, static_cast<std::uint32_t>(rng.bounded(2000)));
      for (std::size_t b = 0; b < len; ++b)
        file.push_back(static_cast<std::uint8_t>(rng.bounded(256)));
    }
    auto path = temp_file("fuzz.pcap");
    write_bytes(path, file);
    try {
      for (const auto& rec : read_pcap(path)) {
        ASSERT_LE(rec.payload_len, rec.frame_len);
      }
    } catch (const TruncatedPacket&) {
      // acceptable outcome for malformed record headers
    }
  }
}

TEST(PcapReader, OutOfOrderTimestampsAreSorted) {
  auto file = global_header(false);
  append_record(file, false, 200, 0, tcp_frame(1, 2, 10, 20, 0, 0));
  append_record(file, false, 100, 0, tcp_frame(3, 4, 30, 40, 0, 0));
  auto path = temp_file("order.pcap");
  write_bytes(path, file);
  auto packets = read_pcap(path);
  ASSERT_EQ(packets.size(), 2u);
  EXPECT_EQ(packets[0].timestamp_us, 0);
  EXPECT_EQ(packets[0].src_port, 30);  // the earlier packet comes first
  EXPECT_EQ(packets[1].timestamp_us, 100000000);
}
