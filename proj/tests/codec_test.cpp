// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lmc/codec.hpp"

#include <gtest/gtest.h>

#include <random>

#include "lmc/error.hpp"
#include "lmc/mask.hpp"
#include "synth.hpp"

namespace lmc {
namespace {

std::vector<CodecId> available_codecs() {
  std::vector<CodecId> out;
  for (const auto& info : list_codecs()) {
    if (info.available) out.push_back(info.id);
  }
  return out;
}

Bytes random_buffer(std::mt19937& rng, std::size_t size) {
  Bytes out(size);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng());
  return out;
}

TEST(ListCodecs, DeclaredMinimumPresent) {
  const auto codecs = list_codecs();
  ASSERT_EQ(codecs.size(), 5u);
  for (const auto& info : codecs) {
    if (info.id == CodecId::kStore || info.id == CodecId::kDeflate || info.id == CodecId::kLz4) {
      EXPECT_TRUE(info.available) << info.name;
    }
  }
}

TEST(ListCodecs, FullBuildHasAllFive) {
#if defined(LMC_TEST_FULL_BUILD)
  for (const auto& info : list_codecs()) EXPECT_TRUE(info.available) << info.name;
#else
  GTEST_SKIP() << "not a full build";
#endif
}

TEST(CodecNames, RoundTripAndAliases) {
  for (const auto& info : list_codecs()) {
    EXPECT_EQ(codec_from_name(info.name), info.id);
  }
  EXPECT_EQ(codec_from_name("gzip"), CodecId::kDeflate);
  EXPECT_EQ(codec_from_name("xz"), CodecId::kLzma);
  EXPECT_EQ(codec_from_name("nope"), std::nullopt);
}

TEST(Store, Identity) {
  std::mt19937 rng(1);
  const Bytes data = random_buffer(rng, 4096);
  const Bytes compressed = compress(data, {CodecId::kStore});
  EXPECT_EQ(compressed, data);
  EXPECT_EQ(decompress(compressed, {CodecId::kStore}), data);
  EXPECT_TRUE(compress({}, {CodecId::kStore}).empty());
  EXPECT_TRUE(decompress({}, {CodecId::kStore}).empty());
}

TEST(Deflate, ZeroRunsCollapse) {
  const Bytes zeros(1 << 20, 0);
  const Bytes compressed = compress(zeros, {CodecId::kDeflate});
  EXPECT_LT(compressed.size(), zeros.size() / 100);  // < 1% of input
  EXPECT_EQ(decompress(compressed, {CodecId::kDeflate}, zeros.size()), zeros);
}

// Lossless roundtrip on arbitrary bytes, >= 1000 random buffers through
// every available codec, plus structured packet data.
TEST(AllCodecs, RoundTripProperty) {
  std::mt19937 rng(42);
  std::vector<Bytes> cases;
  cases.reserve(1010);
  std::uniform_int_distribution<std::size_t> size_dist(0, 4096);
  for (int i = 0; i < 1000; ++i) cases.push_back(random_buffer(rng, size_dist(rng)));
  cases.push_back(Bytes{});
  cases.push_back(Bytes(1, 0x5A));
  cases.push_back(testutil::structured_stream(reference_layout(), 20, 9));

  for (CodecId id : available_codecs()) {
    const CodecSettings settings{id};
    for (const auto& data : cases) {
      const Bytes compressed = compress(data, settings);
      const Bytes back = decompress(compressed, settings, data.size());
      ASSERT_EQ(back, data) << codec_name(id) << " size " << data.size();
    }
  }
}

TEST(AllCodecs, DeterministicAtFixedSettings) {
  const Bytes data = testutil::structured_stream(reference_layout(), 50, 3);
  for (CodecId id : available_codecs()) {
    const CodecSettings settings{id};
    EXPECT_EQ(compress(data, settings), compress(data, settings)) << codec_name(id);
  }
}

// A flipped byte in the compressed stream must never decode to silently
// different output: either the decode errors out or the flip was in a
// genuinely ignored spot (bitstream padding) and the output is identical.
// STORE has no redundancy of its own (the container CRC covers it), so
// it is exempt here.
TEST(AllCodecs, SingleByteFlipsAreDetected) {
  const Bytes data = testutil::structured_stream(reference_layout(), 2, 17);
  for (CodecId id : available_codecs()) {
    if (id == CodecId::kStore) continue;
    const CodecSettings settings{id};
    const Bytes compressed = compress(data, settings);
    std::size_t detected = 0;
    for (std::size_t pos = 0; pos < compressed.size(); ++pos) {
      Bytes corrupt = compressed;
      corrupt[pos] ^= 0x20;
      try {
        const Bytes out = decompress(corrupt, settings, data.size());
        ASSERT_EQ(out, data) << codec_name(id) << " silently corrupted at byte " << pos;
      } catch (const Error&) {
        ++detected;
      }
    }
    // Nearly every position is covered by a checksum; only padding bits
    // may go unnoticed.
    EXPECT_GE(detected, compressed.size() * 9 / 10) << codec_name(id);
  }
}

TEST(AllCodecs, TruncationIsAnError) {
  const Bytes data = testutil::structured_stream(reference_layout(), 2, 23);
  for (CodecId id : available_codecs()) {
    if (id == CodecId::kStore) continue;
    const CodecSettings settings{id};
    const Bytes compressed = compress(data, settings);
    const ByteSpan cut(compressed.data(), compressed.size() / 2);
    EXPECT_THROW((void)decompress(cut, settings, data.size()), Error) << codec_name(id);
  }
}

// Masked streams compress at least as well as unmasked ones on
// structured data: zeroed low bits remove the noise entropy.
TEST(AllCodecs, MaskedBeatsUnmasked) {
  const PacketLayout& layout = reference_layout();
  const Bytes stream = testutil::structured_stream(layout, 200, 77);
  Bytes masked = stream;
  apply_mask_batch(masked, PacketMask(layout, 4));

  for (CodecId id : available_codecs()) {
    const CodecSettings settings{id};
    const std::size_t plain = compress(stream, settings).size();
    const std::size_t with_mask = compress(masked, settings).size();
    EXPECT_LE(with_mask, plain) << codec_name(id);
  }
}

TEST(Levels, OutOfRangeRejected) {
  EXPECT_THROW(compress(Bytes(16, 0), {CodecId::kDeflate, 10}), ParameterError);
  EXPECT_THROW(compress(Bytes(16, 0), {CodecId::kBzip2, 0}), ParameterError);
  EXPECT_NO_THROW(compress(Bytes(16, 0), {CodecId::kDeflate, 9}));
}

TEST(Capability, UnknownCodecIdThrows) {
  const CodecSettings bogus{static_cast<CodecId>(99)};
  EXPECT_THROW(compress(Bytes(16, 0), bogus), CapabilityError);
  EXPECT_THROW(decompress(Bytes(16, 0), bogus), CapabilityError);
}

}  // namespace
}  // namespace lmc
