// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lmc/container.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "lmc/error.hpp"
#include "synth.hpp"

namespace lmc {
namespace {

StreamHeader test_header(CodecId codec = CodecId::kStore, unsigned n = 4) {
  return make_stream_header(reference_layout(), n, codec);
}

std::istringstream to_stream(ByteSpan bytes) {
  return std::istringstream(std::string(bytes.begin(), bytes.end()), std::ios::binary);
}

TEST(Crc32, KnownVector) {
  const Bytes check{'1', '2', '3', '4', '5', '6', '7', '8', '9'};
  EXPECT_EQ(crc32(check), 0xCBF43926u);  // standard CRC-32 check value
  EXPECT_EQ(crc32({}), 0u);
}

TEST(StreamHeaderCodec, EncodeDecodeBitExact) {
  StreamHeader h = test_header(CodecId::kLz4, 7);
  const auto bytes = h.encode();
  ASSERT_EQ(bytes.size(), 21u);
  EXPECT_EQ(bytes[0], 'L');
  EXPECT_EQ(bytes[1], 'M');
  EXPECT_EQ(bytes[2], 'C');
  EXPECT_EQ(bytes[3], '1');
  EXPECT_EQ(bytes[4], 1);               // version
  EXPECT_EQ(bytes[5], 4);               // codec id lz4
  EXPECT_EQ(bytes[6], 7);               // masked bits
  EXPECT_EQ(load_le16(&bytes[7]), 1206);
  EXPECT_EQ(load_le32(&bytes[9]), 2000u);  // micrometers
  EXPECT_EQ(StreamHeader::decode(bytes), h);
}

TEST(StreamHeaderCodec, BadMagicAndVersion) {
  auto bytes = test_header().encode();
  bytes[0] = 'X';
  EXPECT_THROW(StreamHeader::decode(bytes), FormatError);
  auto bytes2 = test_header().encode();
  bytes2[4] = 9;
  EXPECT_THROW(StreamHeader::decode(bytes2), FormatError);
}

TEST(WriteStream, EmptyInputIsHeaderPlusTerminal) {
  const Bytes container = write_stream({}, test_header(), {CodecId::kStore}, 100);
  EXPECT_EQ(container.size(), StreamHeader::kEncodedSize + FrameHeader::kEncodedSize);
  const auto [header, packets] = read_stream(container);
  EXPECT_TRUE(packets.empty());
  EXPECT_EQ(header, test_header());
}

TEST(WriteStream, FrameArithmetic250By100) {
  std::mt19937 rng(1);
  const Bytes packets = testutil::random_stream(reference_layout(), 250, rng);
  const Bytes container = write_stream(packets, test_header(), {CodecId::kStore}, 100);

  auto in = to_stream(container);
  StreamReader reader(in);
  std::vector<std::uint32_t> counts;
  while (auto frame = reader.next_frame()) counts.push_back(frame->packet_count);
  EXPECT_EQ(counts, (std::vector<std::uint32_t>{100, 100, 50}));
  EXPECT_TRUE(reader.reached_terminal());
}

TEST(RoundTrip, AllCodecsAndFrameSizes) {
  std::mt19937 rng(2);
  const Bytes packets = testutil::random_stream(reference_layout(), 23, rng);
  for (const auto& info : list_codecs()) {
    if (!info.available) continue;
    for (std::uint32_t frame_size : {1u, 7u, 100u, 4096u}) {
      const Bytes container =
          write_stream(packets, test_header(info.id), {info.id}, frame_size);
      const auto [header, back] = read_stream(container);
      ASSERT_EQ(back, packets) << info.name << " frame_size " << frame_size;
      EXPECT_EQ(header.codec, info.id);
    }
  }
}

TEST(RoundTrip, DeterministicOutput) {
  std::mt19937 rng(3);
  const Bytes packets = testutil::random_stream(reference_layout(), 10, rng);
  const Bytes a = write_stream(packets, test_header(CodecId::kDeflate), {CodecId::kDeflate}, 4);
  const Bytes b = write_stream(packets, test_header(CodecId::kDeflate), {CodecId::kDeflate}, 4);
  EXPECT_EQ(a, b);
}

// Any frame decodes given only the stream header and that frame's bytes.
TEST(FrameIndependence, SingleFrameDecodesAlone) {
  std::mt19937 rng(4);
  const Bytes packets = testutil::random_stream(reference_layout(), 9, rng);
  const Bytes container =
      write_stream(packets, test_header(CodecId::kLz4), {CodecId::kLz4}, 3);

  // Locate the second frame by walking the chain.
  std::size_t offset = StreamHeader::kEncodedSize;
  FrameHeader first = FrameHeader::decode(ByteSpan(container).subspan(offset, 12));
  offset += FrameHeader::kEncodedSize + first.compressed_len;
  FrameHeader second = FrameHeader::decode(ByteSpan(container).subspan(offset, 12));

  // Rebuild a stream of just the header + second frame + terminal.
  Bytes alone(container.begin(), container.begin() + StreamHeader::kEncodedSize);
  alone.insert(alone.end(), container.begin() + static_cast<std::ptrdiff_t>(offset),
               container.begin() +
                   static_cast<std::ptrdiff_t>(offset + FrameHeader::kEncodedSize +
                                               second.compressed_len));
  const auto terminal = FrameHeader{}.encode();
  alone.insert(alone.end(), terminal.begin(), terminal.end());

  const auto [header, back] = read_stream(alone);
  EXPECT_EQ(back.size(), std::size_t{3} * 1206);
  EXPECT_TRUE(std::equal(back.begin(), back.end(), packets.begin() + 3 * 1206));
}

TEST(ReadStream, ChecksumCorruptionNamesFrame) {
  std::mt19937 rng(5);
  const Bytes packets = testutil::random_stream(reference_layout(), 10, rng);
  Bytes container = write_stream(packets, test_header(CodecId::kDeflate), {CodecId::kDeflate}, 2);

  // Corrupt one payload byte of the third frame (index 2).
  std::size_t offset = StreamHeader::kEncodedSize;
  for (int skip = 0; skip < 2; ++skip) {
    const FrameHeader fh = FrameHeader::decode(ByteSpan(container).subspan(offset, 12));
    offset += FrameHeader::kEncodedSize + fh.compressed_len;
  }
  container[offset + FrameHeader::kEncodedSize + 5] ^= 0xFF;

  auto in = to_stream(container);
  StreamReader reader(in);
  std::uint64_t frames = 0;
  try {
    while (auto frame = reader.next_frame()) ++frames;
    FAIL() << "corruption not detected";
  } catch (const IntegrityError& e) {
    EXPECT_EQ(frames, 2u);
    ASSERT_TRUE(e.frame_index().has_value());
    EXPECT_EQ(*e.frame_index(), 2u);
  }
}

TEST(ReadStream, TruncationDeliversCompleteFramesFirst) {
  std::mt19937 rng(6);
  const Bytes packets = testutil::random_stream(reference_layout(), 10, rng);
  const Bytes container = write_stream(packets, test_header(CodecId::kLz4), {CodecId::kLz4}, 2);

  // Cut inside the fourth frame.
  std::size_t offset = StreamHeader::kEncodedSize;
  for (int skip = 0; skip < 3; ++skip) {
    const FrameHeader fh = FrameHeader::decode(ByteSpan(container).subspan(offset, 12));
    offset += FrameHeader::kEncodedSize + fh.compressed_len;
  }
  const Bytes cut(container.begin(), container.begin() + static_cast<std::ptrdiff_t>(offset + 5));

  auto in = to_stream(cut);
  StreamReader reader(in);
  std::uint64_t packets_seen = 0;
  try {
    while (auto frame = reader.next_frame()) packets_seen += frame->packet_count;
    FAIL() << "truncation not detected";
  } catch (const TruncationError&) {
    EXPECT_EQ(packets_seen, 6u);  // three complete frames of two packets
  }
  EXPECT_FALSE(reader.recover());  // nothing after the cut can validate
}

TEST(ReadStream, HeaderOnlyStreamIsTruncated) {
  const auto header_bytes = test_header().encode();
  auto in = to_stream(header_bytes);
  StreamReader reader(in);
  EXPECT_THROW((void)reader.next_frame(), TruncationError);
}

TEST(ReadStream, RecoverSkipsCorruptFrame) {
  std::mt19937 rng(7);
  const Bytes packets = testutil::random_stream(reference_layout(), 10, rng);
  Bytes container = write_stream(packets, test_header(CodecId::kDeflate), {CodecId::kDeflate}, 2);

  // Corrupt the length field of the second frame: resync has to scan.
  std::size_t offset = StreamHeader::kEncodedSize;
  const FrameHeader f0 = FrameHeader::decode(ByteSpan(container).subspan(offset, 12));
  offset += FrameHeader::kEncodedSize + f0.compressed_len;
  container[offset + 4] ^= 0x01;

  auto in = to_stream(container);
  StreamReader reader(in);
  std::vector<std::uint64_t> good;
  std::vector<std::uint64_t> bad;
  bool done = false;
  while (!done) {
    try {
      auto frame = reader.next_frame();
      if (!frame) break;
      good.push_back(frame->index);
    } catch (const IntegrityError& e) {
      bad.push_back(e.frame_index().value_or(999));
      if (!reader.recover()) done = true;
    } catch (const TruncationError&) {
      if (!reader.recover()) done = true;
    }
  }
  EXPECT_EQ(bad, (std::vector<std::uint64_t>{1}));
  EXPECT_EQ(good, (std::vector<std::uint64_t>{0, 2, 3, 4}));
  EXPECT_TRUE(reader.reached_terminal());
}

TEST(WriteStream, RejectsBadShapes) {
  EXPECT_THROW(write_stream(Bytes(100, 0), test_header(), {CodecId::kStore}, 10),
               StructuralError);
  EXPECT_THROW(write_stream({}, test_header(), {CodecId::kStore}, 0), ParameterError);
  std::ostringstream out;
  EXPECT_THROW(StreamWriter(out, test_header(CodecId::kLz4), {CodecId::kStore}), ParameterError);
}

}  // namespace
}  // namespace lmc
