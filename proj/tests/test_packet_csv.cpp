#include "driftstream/packet_csv.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "driftstream/error.hpp"
#include "driftstream/rng.hpp"

using namespace driftstream;

namespace {

PacketRecord random_record(Rng& rng, std::int64_t ts) {
  PacketRecord p;
  p.timestamp_us = ts;
  p.src_ip = static_cast<std::uint32_t>(rng.next());
  p.dst_ip = static_cast<std::uint32_t>(rng.next());
  p.src_port = static_cast<std::uint16_t>(rng.bounded(65536));
  p.dst_port = static_cast<std::uint16_t>(rng.bounded(65536));
  switch (rng.bounded(4)) {
    case 0: p.protocol = Protocol::TCP; break;
    case 1: p.protocol = Protocol::UDP; break;
    case 2: p.protocol = Protocol::ICMP; break;
    default: p.protocol = Protocol::OTHER; break;
  }
  p.frame_len = 60 + static_cast<std::uint32_t>(rng.bounded(1400));
  p.payload_len = static_cast<std::uint32_t>(rng.bounded(p.frame_len + 1));
  p.tcp_flags = p.protocol == Protocol::TCP
                    ? static_cast<std::uint8_t>(rng.bounded(256))
                    : 0;
  switch (rng.bounded(3)) {
    case 0: p.label = Label::benign; break;
    case 1: p.label = Label::malicious; break;
    default: p.label = std::nullopt; break;
  }
  return p;
}

}  // namespace

TEST(PacketCsv, HeaderIsCanonical) {
  std::ostringstream out;
  write_packet_csv(out, {});
  EXPECT_EQ(out.str(),
            "timestamp_us,src_ip,dst_ip,src_port,dst_port,protocol,frame_len,"
            "payload_len,tcp_flags,label\n");
}

// Round-trip: any record sequence written and re-read is identical.
TEST(PacketCsv, RoundTripIsExact) {
  Rng rng(314);
  std::vector<PacketRecord> packets;
  for (int i = 0; i < 500; ++i) packets.push_back(random_record(rng, i * 100));

  std::ostringstream out;
  write_packet_csv(out, packets);
  std::istringstream in(out.str());
  auto reread = read_packet_csv(in);
  ASSERT_EQ(reread.size(), packets.size());
  for (std::size_t i = 0; i < packets.size(); ++i)
    EXPECT_EQ(reread[i], packets[i]) << "row " << i;
}

TEST(PacketCsv, LabeledRowsParse) {
  std::istringstream in(
      "timestamp_us,src_ip,dst_ip,src_port,dst_port,protocol,frame_len,"
      "payload_len,tcp_flags,label\n"
      "1000,10.0.0.1,10.0.0.2,1234,80,TCP,100,40,24,benign\n"
      "2000,10.0.0.3,10.0.0.4,4321,443,UDP,200,172,0,malicious\n");
  auto packets = read_packet_csv(in);
  ASSERT_EQ(packets.size(), 2u);
  EXPECT_EQ(packets[0].label, Label::benign);
  EXPECT_EQ(packets[1].label, Label::malicious);
  EXPECT_EQ(packets[0].src_ip, 0x0A000001u);
  EXPECT_EQ(packets[1].protocol, Protocol::UDP);
}

TEST(PacketCsv, OutOfOrderRowsAreSorted) {
  std::istringstream in(
      "timestamp_us,src_ip,dst_ip,src_port,dst_port,protocol,frame_len,"
      "payload_len,tcp_flags,label\n"
      "5000,1.1.1.1,2.2.2.2,1,2,TCP,100,0,0,\n"
      "1000,3.3.3.3,4.4.4.4,3,4,TCP,100,0,0,\n");
  auto packets = read_packet_csv(in);
  ASSERT_EQ(packets.size(), 2u);
  EXPECT_EQ(packets[0].timestamp_us, 1000);
  EXPECT_EQ(packets[1].timestamp_us, 5000);
}

TEST(PacketCsv, MissingColumnIsSchemaMismatch) {
  std::istringstream in(
      "timestamp_us,src_ip,dst_ip,src_port,protocol,frame_len,"
      "payload_len,tcp_flags,label\n");  // dst_port missing
  EXPECT_THROW(read_packet_csv(in), SchemaMismatch);
}

TEST(PacketCsv, EmptyFileIsSchemaMismatch) {
  std::istringstream in("");
  EXPECT_THROW(read_packet_csv(in), SchemaMismatch);
}

TEST(PacketCsv, BadRowReportsIndex) {
  std::istringstream in(
      "timestamp_us,src_ip,dst_ip,src_port,dst_port,protocol,frame_len,"
      "payload_len,tcp_flags,label\n"
      "1000,1.1.1.1,2.2.2.2,1,2,TCP,100,0,0,\n"
      "2000,1.1.1.1,2.2.2.2,1,2,BOGUS,100,0,0,\n");
  try {
    read_packet_csv(in);
    FAIL() << "expected UnparsableRow";
  } catch (const UnparsableRow& e) {
    EXPECT_EQ(e.row_index, 2u);
  }
}

TEST(PacketCsv, PayloadExceedingFrameRejected) {
  std::istringstream in(
      "timestamp_us,src_ip,dst_ip,src_port,dst_port,protocol,frame_len,"
      "payload_len,tcp_flags,label\n"
      "1000,1.1.1.1,2.2.2.2,1,2,TCP,100,200,0,\n");
  EXPECT_THROW(read_packet_csv(in), UnparsableRow);
}
