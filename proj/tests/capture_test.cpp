// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lmc/capture.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "lmc/container.hpp"
#include "lmc/error.hpp"
#include "synth.hpp"

namespace lmc {
namespace {

using testutil::PcapBuilder;

std::istringstream to_stream(ByteSpan bytes) {
  return std::istringstream(std::string(bytes.begin(), bytes.end()), std::ios::binary);
}

Bytes payload_of_size(std::size_t n, std::uint8_t fill) { return Bytes(n, fill); }

TEST(PcapReader, FiltersUdpRecords) {
  PcapBuilder pcap;
  Timestamp ts{1000, 0};
  for (int i = 0; i < 10; ++i) {
    pcap.add_udp(2368, payload_of_size(1206, static_cast<std::uint8_t>(i)), ts);
    ts.sec += 1;
  }
  for (int i = 0; i < 3; ++i) pcap.add_arp(ts);

  auto in = to_stream(pcap.bytes());
  PcapReader reader(in);
  int count = 0;
  while (auto packet = reader.next()) {
    EXPECT_EQ(packet->payload.size(), 1206u);
    EXPECT_EQ(packet->payload[0], static_cast<std::uint8_t>(count));
    ++count;
  }
  EXPECT_EQ(count, 10);
  EXPECT_EQ(reader.stats().matched, 10u);
  EXPECT_EQ(reader.stats().non_udp, 3u);
  EXPECT_EQ(reader.dataset_duration_s(), 9.0);
}

TEST(PcapReader, ByteSwappedMagicYieldsSamePackets) {
  std::mt19937 rng(1);
  std::vector<Bytes> payloads;
  for (int i = 0; i < 5; ++i) {
    Bytes p(1206);
    for (auto& b : p) b = static_cast<std::uint8_t>(rng());
    payloads.push_back(std::move(p));
  }

  PcapBuilder native;
  PcapBuilder swapped(testutil::PcapOptions{.byte_swapped = true});
  for (std::size_t i = 0; i < payloads.size(); ++i) {
    const Timestamp ts{100 + i, static_cast<std::uint32_t>(i * 1000)};
    native.add_udp(2368, payloads[i], ts);
    swapped.add_udp(2368, payloads[i], ts);
  }

  auto in_a = to_stream(native.bytes());
  auto in_b = to_stream(swapped.bytes());
  PcapReader a(in_a);
  PcapReader b(in_b);
  EXPECT_FALSE(a.byte_swapped());
  EXPECT_TRUE(b.byte_swapped());
  while (true) {
    auto pa = a.next();
    auto pb = b.next();
    ASSERT_EQ(pa.has_value(), pb.has_value());
    if (!pa) break;
    EXPECT_EQ(pa->payload, pb->payload);
    EXPECT_EQ(pa->ts, pb->ts);
  }
}

TEST(PcapReader, NanosecondMagicKeepsPrecision) {
  PcapBuilder pcap(testutil::PcapOptions{.nanosecond = true});
  pcap.add_udp(2368, payload_of_size(1206, 1), {42, 123456789});
  auto in = to_stream(pcap.bytes());
  PcapReader reader(in);
  EXPECT_TRUE(reader.nanosecond_timestamps());
  auto packet = reader.next();
  ASSERT_TRUE(packet);
  EXPECT_EQ(packet->ts.nsec, 123456789u);
}

TEST(PcapReader, WrongSizeOnRightPortIsCountedSkip) {
  PcapBuilder pcap;
  pcap.add_udp(2368, payload_of_size(512, 7), {1, 0});
  pcap.add_udp(2368, payload_of_size(1206, 8), {2, 0});
  pcap.add_udp(9999, payload_of_size(1206, 9), {3, 0});
  pcap.add_fragmented_udp(2368, payload_of_size(1206, 10), {4, 0});

  auto in = to_stream(pcap.bytes());
  PcapReader reader(in);
  int count = 0;
  while (auto packet = reader.next()) {
    EXPECT_EQ(packet->payload[0], 8);
    ++count;
  }
  EXPECT_EQ(count, 1);
  EXPECT_EQ(reader.stats().wrong_size, 1u);
  EXPECT_EQ(reader.stats().wrong_port, 1u);
  EXPECT_EQ(reader.stats().fragmented, 1u);
  EXPECT_EQ(reader.stats().records, 4u);
}

TEST(PcapReader, BadMagicIsFormatError) {
  const Bytes junk(64, 0xAB);
  auto in = to_stream(junk);
  EXPECT_THROW(PcapReader reader(in), FormatError);
}

TEST(PcapReader, TruncatedRecordYieldsPriorPacketsThenThrows) {
  PcapBuilder pcap;
  pcap.add_udp(2368, payload_of_size(1206, 1), {1, 0});
  pcap.add_udp(2368, payload_of_size(1206, 2), {2, 0});
  Bytes cut = pcap.bytes();
  cut.resize(cut.size() - 100);

  auto in = to_stream(cut);
  PcapReader reader(in);
  auto first = reader.next();
  ASSERT_TRUE(first);
  EXPECT_EQ(first->payload[0], 1);
  EXPECT_THROW((void)reader.next(), TruncationError);
}

TEST(RawReader, SlicesWholePackets) {
  const Bytes data(3 * 1206, 0x42);
  auto in = to_stream(data);
  RawReader reader(in, 1206);
  int count = 0;
  Timestamp last{};
  while (auto packet = reader.next()) {
    EXPECT_EQ(packet->payload.size(), 1206u);
    last = packet->ts;
    ++count;
  }
  EXPECT_EQ(count, 3);
  EXPECT_FALSE(reader.truncated_tail());
  // Synthetic clock at the nominal 1.33 ms interval.
  EXPECT_EQ(last.nsec, 2 * 1'330'000u);
  EXPECT_NEAR(reader.dataset_duration_s(), 3 * 1.33e-3, 1e-12);
}

TEST(RawReader, TrailingPartialSetsWarning) {
  const Bytes data(3 * 1206 + 1, 0);
  auto in = to_stream(data);
  RawReader reader(in, 1206);
  int count = 0;
  while (reader.next()) ++count;
  EXPECT_EQ(count, 3);
  EXPECT_TRUE(reader.truncated_tail());
}

TEST(RawReader, EmptyFile) {
  auto in = to_stream({});
  RawReader reader(in, 1206);
  EXPECT_FALSE(reader.next());
  EXPECT_FALSE(reader.truncated_tail());
  EXPECT_EQ(reader.dataset_duration_s(), 0.0);
}

TEST(PcapWriter, RoundTripPayloadsAndTimestamps) {
  std::mt19937 rng(2);
  std::vector<TimedPacket> packets;
  for (int i = 0; i < 100; ++i) {
    Bytes p(1206);
    for (auto& b : p) b = static_cast<std::uint8_t>(rng());
    // Microsecond-representable timestamps survive the roundtrip exactly.
    packets.push_back({{static_cast<std::uint64_t>(1700000000 + i),
                        static_cast<std::uint32_t>((i * 1333) % 1000000) * 1000u},
                       std::move(p)});
  }

  std::ostringstream out(std::ios::binary);
  PcapWriter writer(out, 2368);
  for (const auto& p : packets) writer.write(p);

  const std::string written = out.str();
  auto in = to_stream(Bytes(written.begin(), written.end()));
  PcapReader reader(in);
  std::size_t i = 0;
  while (auto packet = reader.next()) {
    ASSERT_LT(i, packets.size());
    EXPECT_EQ(packet->payload, packets[i].payload);
    EXPECT_EQ(packet->ts, packets[i].ts);
    ++i;
  }
  EXPECT_EQ(i, packets.size());
}

// Emitted files must parse in an independent implementation written from
// the published formats (tests/support/pcap_check.py).
TEST(PcapWriter, EmittedFileParsesInReferenceParser) {
  if (std::system("python3 -c '' 2>/dev/null") != 0) {
    GTEST_SKIP() << "python3 not available";
  }
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "lmc_pcap_check";
  fs::create_directories(dir);
  const fs::path pcap_path = dir / "out.pcap";
  const fs::path report_path = dir / "parsed.txt";

  std::mt19937 rng(21);
  std::vector<TimedPacket> packets;
  {
    std::ofstream out(pcap_path, std::ios::binary);
    PcapWriter writer(out, 2368);
    for (int i = 0; i < 25; ++i) {
      Bytes p(1206);
      for (auto& b : p) b = static_cast<std::uint8_t>(rng());
      TimedPacket tp{{static_cast<std::uint64_t>(1000 + i), static_cast<std::uint32_t>(i) * 7000},
                     std::move(p)};
      writer.write(tp);
      packets.push_back(tp);
    }
  }

  const std::string cmd = std::string("python3 ") + LMC_TEST_SUPPORT_DIR +
                          "/pcap_check.py " + pcap_path.string() + " > " + report_path.string();
  ASSERT_EQ(std::system(cmd.c_str()), 0);

  std::ifstream report(report_path);
  std::string line;
  std::size_t i = 0;
  while (std::getline(report, line)) {
    ASSERT_LT(i, packets.size());
    char expected[64];
    std::snprintf(expected, sizeof(expected), "2368 %llu.%06u %08x",
                  static_cast<unsigned long long>(packets[i].ts.sec),
                  packets[i].ts.nsec / 1000, crc32(packets[i].payload));
    EXPECT_EQ(line, expected) << "record " << i;
    ++i;
  }
  EXPECT_EQ(i, packets.size());
  fs::remove_all(dir);
}

TEST(DetectFormat, SniffsAllThree) {
  PcapBuilder pcap;
  pcap.add_udp(2368, payload_of_size(1206, 0), {1, 0});
  auto in1 = to_stream(pcap.bytes());
  EXPECT_EQ(detect_format(in1), CaptureFormat::kPcap);

  const Bytes lmc{'L', 'M', 'C', '1', 1};
  auto in2 = to_stream(lmc);
  EXPECT_EQ(detect_format(in2), CaptureFormat::kLmcContainer);

  const Bytes raw(100, 0x11);
  auto in3 = to_stream(raw);
  EXPECT_EQ(detect_format(in3), CaptureFormat::kRaw);

  // Detection must not consume the stream.
  Bytes first4(4);
  in1.read(reinterpret_cast<char*>(first4.data()), 4);
  EXPECT_EQ(load_le32(first4.data()), 0xA1B2C3D4u);
}

}  // namespace
}  // namespace lmc
