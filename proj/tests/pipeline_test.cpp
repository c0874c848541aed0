// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lmc/pipeline.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "lmc/container.hpp"
#include "lmc/error.hpp"
#include "lmc/mask.hpp"
#include "synth.hpp"

namespace lmc {
namespace {

/// Sink that concatenates payloads in memory.
class VectorSink : public PacketSink {
 public:
  void write(const TimedPacket& packet) override {
    data.insert(data.end(), packet.payload.begin(), packet.payload.end());
    ++count;
  }
  Bytes data;
  std::uint64_t count = 0;
};

Bytes masked_copy(ByteSpan stream, unsigned n) {
  Bytes out(stream.begin(), stream.end());
  apply_mask_batch(out, PacketMask(reference_layout(), n));
  return out;
}

std::string run_compress(ByteSpan packets, PipelineConfig config, CompressionReport* report = nullptr) {
  MemorySource source(packets, reference_layout().packet_size());
  std::ostringstream out(std::ios::binary);
  CompressionReport r = compress_capture(source, out, reference_layout(), config);
  if (report) *report = r;
  return out.str();
}

TEST(CompressCapture, StoreN0IsPureFraming) {
  std::mt19937 rng(1);
  const Bytes packets = testutil::random_stream(reference_layout(), 25, rng);
  PipelineConfig config;
  config.frame_size = 10;
  CompressionReport report;
  const std::string container = run_compress(packets, config, &report);

  // Lossless mode: payload bytes inside the container equal the input.
  const auto [header, back] = read_stream(
      ByteSpan(reinterpret_cast<const std::uint8_t*>(container.data()), container.size()));
  EXPECT_EQ(back, packets);
  EXPECT_EQ(header.masked_bits, 0);
  EXPECT_EQ(report.original_bytes, packets.size());
  // Container adds only header + 4 frame headers of overhead.
  EXPECT_EQ(report.compressed_bytes,
            packets.size() + StreamHeader::kEncodedSize + 4 * FrameHeader::kEncodedSize);
}

TEST(CompressCapture, RoundTripEqualsMaskedInput) {
  std::mt19937 rng(2);
  const Bytes packets = testutil::random_stream(reference_layout(), 57, rng);
  for (const auto& info : list_codecs()) {
    if (!info.available) continue;
    for (unsigned n : {0u, 4u, 8u}) {
      PipelineConfig config;
      config.masked_bits = n;
      config.codec = {info.id};
      config.frame_size = 10;
      const std::string container = run_compress(packets, config);

      std::istringstream in(container, std::ios::binary);
      VectorSink sink;
      const DecompressResult result = decompress_capture(in, sink);
      EXPECT_TRUE(result.clean());
      ASSERT_EQ(sink.data, masked_copy(packets, n)) << info.name << " n=" << n;
      EXPECT_EQ(result.packets_recovered, 57u);
    }
  }
}

TEST(CompressCapture, WorkerPoolMatchesSingleThread) {
  std::mt19937 rng(3);
  const Bytes packets = testutil::random_stream(reference_layout(), 120, rng);
  PipelineConfig one;
  one.masked_bits = 4;
  one.codec = {CodecId::kLz4};
  one.frame_size = 7;
  PipelineConfig four = one;
  four.worker_count = 4;
  // Frames are emitted strictly in order, so the bytes are identical.
  EXPECT_EQ(run_compress(packets, one), run_compress(packets, four));
}

TEST(CompressCapture, ReportTimingFieldsMeasured) {
  std::mt19937 rng(4);
  const Bytes packets = testutil::random_stream(reference_layout(), 100, rng);
  PipelineConfig config;
  config.masked_bits = 4;
  config.codec = {CodecId::kDeflate};
  CompressionReport report;
  run_compress(packets, config, &report);
  EXPECT_GT(report.processing_time_s, 0.0);
  EXPECT_GT(report.codec_time_s, 0.0);
  EXPECT_GE(report.mask_time_s, 0.0);
  EXPECT_GT(report.rfs, 0.0);
  EXPECT_EQ(report.packets, 100u);
  EXPECT_NEAR(report.dataset_duration_s, 100 * 1.33e-3, 1e-9);
}

TEST(CompressCapture, WrongPacketSizeIsStructuralError) {
  const Bytes bad(100, 0);
  MemorySource source(bad, 100);
  std::ostringstream out;
  PipelineConfig config;
  EXPECT_THROW(compress_capture(source, out, reference_layout(), config), StructuralError);
}

TEST(CompressCapture, ConfigValidation) {
  std::ostringstream out;
  const Bytes packets;
  MemorySource source(packets, 1206);
  PipelineConfig config;
  config.masked_bits = 16;
  EXPECT_THROW(compress_capture(source, out, reference_layout(), config), ParameterError);
  config.masked_bits = 4;
  config.frame_size = 0;
  EXPECT_THROW(compress_capture(source, out, reference_layout(), config), ParameterError);
}

TEST(DecompressCapture, CorruptMiddleFrameIsReportedOthersRecovered) {
  std::mt19937 rng(5);
  const Bytes packets = testutil::random_stream(reference_layout(), 50, rng);
  PipelineConfig config;
  config.masked_bits = 4;
  config.codec = {CodecId::kLz4};
  config.frame_size = 10;
  std::string container = run_compress(packets, config);

  // Flip one byte in the payload of frame 2 (of 5).
  std::size_t offset = StreamHeader::kEncodedSize;
  for (int skip = 0; skip < 2; ++skip) {
    const FrameHeader fh = FrameHeader::decode(ByteSpan(
        reinterpret_cast<const std::uint8_t*>(container.data()) + offset, 12));
    offset += FrameHeader::kEncodedSize + fh.compressed_len;
  }
  container[offset + FrameHeader::kEncodedSize + 3] =
      static_cast<char>(container[offset + FrameHeader::kEncodedSize + 3] ^ 0xFF);

  std::istringstream in(container, std::ios::binary);
  VectorSink sink;
  const DecompressResult result = decompress_capture(in, sink);
  EXPECT_FALSE(result.truncated);
  ASSERT_EQ(result.lost_frames, (std::vector<std::uint64_t>{2}));
  EXPECT_EQ(result.packets_recovered, 40u);

  // Recovered packets byte-equal the corresponding masked originals.
  const Bytes expected = masked_copy(packets, 4);
  const std::size_t frame_bytes = std::size_t{10} * 1206;
  Bytes expected_surviving;
  for (int f = 0; f < 5; ++f) {
    if (f == 2) continue;
    expected_surviving.insert(expected_surviving.end(),
                              expected.begin() + static_cast<std::ptrdiff_t>(f * frame_bytes),
                              expected.begin() + static_cast<std::ptrdiff_t>((f + 1) * frame_bytes));
  }
  EXPECT_EQ(sink.data, expected_surviving);
}

TEST(DecompressCapture, TruncatedContainerReportsTruncation) {
  std::mt19937 rng(6);
  const Bytes packets = testutil::random_stream(reference_layout(), 30, rng);
  PipelineConfig config;
  config.codec = {CodecId::kDeflate};
  config.frame_size = 10;
  std::string container = run_compress(packets, config);
  container.resize(container.size() - 20);

  std::istringstream in(container, std::ios::binary);
  VectorSink sink;
  const DecompressResult result = decompress_capture(in, sink);
  EXPECT_TRUE(result.truncated);
  EXPECT_EQ(result.packets_recovered, 20u);  // two complete frames
}

}  // namespace
}  // namespace lmc
