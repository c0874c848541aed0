// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lmc/mask.hpp"

#include <gtest/gtest.h>

#include <random>

#include "lmc/error.hpp"
#include "synth.hpp"

namespace lmc {
namespace {

using testutil::blank_packet;
using testutil::random_packet;

// Independent oracle: shift-based truncation, a different route than the
// byte mask.
std::uint32_t truncate_oracle(std::uint32_t raw, unsigned n) { return (raw >> n) << n; }

TEST(BuildMask, ZeroBitsIsAllOnes) {
  const PacketMask mask(reference_layout(), 0);
  for (std::uint8_t b : mask.bytes()) EXPECT_EQ(b, 0xFF);

  std::mt19937 rng(1);
  const Bytes packet = random_packet(reference_layout(), rng);
  EXPECT_EQ(apply_mask(packet, mask), packet);
}

TEST(BuildMask, TwoBitsLsbFirstField) {
  const PacketLayout layout(8, {{2, 16, ByteOrder::kLsbFirst}}, 2.0, 15, 30.0);
  const PacketMask mask(layout, 2);
  EXPECT_EQ(mask.bytes()[2], 0xFC);  // low byte first
  EXPECT_EQ(mask.bytes()[3], 0xFF);
  EXPECT_EQ(mask.bytes()[0], 0xFF);  // bytes outside the field untouched
}

TEST(BuildMask, HighByteMaskingAbove8Bits) {
  const PacketLayout layout(4, {{0, 16, ByteOrder::kLsbFirst}}, 2.0, 15, 30.0);
  const PacketMask m10(layout, 10);
  EXPECT_EQ(m10.bytes()[0], 0x00);
  EXPECT_EQ(m10.bytes()[1], 0xFC);  // (0xFF << 2) & 0xFF
  const PacketMask m15(layout, 15);
  EXPECT_EQ(m15.bytes()[0], 0x00);
  EXPECT_EQ(m15.bytes()[1], 0x80);
}

TEST(BuildMask, MsbFirstField) {
  const PacketLayout layout(4, {{0, 16, ByteOrder::kMsbFirst}}, 2.0, 15, 30.0);
  const PacketMask mask(layout, 4);
  EXPECT_EQ(mask.bytes()[0], 0xFF);  // high byte first
  EXPECT_EQ(mask.bytes()[1], 0xF0);
}

// Enumerates the reference layout: every range field low byte is 0xF0 at
// n = 4 and every non-range byte stays 0xFF.
TEST(BuildMask, ReferenceLayoutN4Enumerated) {
  const PacketLayout& layout = reference_layout();
  const PacketMask mask(layout, 4);
  std::vector<bool> is_range_byte(layout.packet_size(), false);
  for (const auto& f : layout.range_fields()) {
    for (std::uint32_t i = 0; i < f.width_bytes(); ++i) is_range_byte[f.offset + i] = true;
    EXPECT_EQ(mask.bytes()[f.offset], 0xF0);
    EXPECT_EQ(mask.bytes()[f.offset + 1], 0xFF);
  }
  for (std::uint32_t i = 0; i < layout.packet_size(); ++i) {
    if (!is_range_byte[i]) EXPECT_EQ(mask.bytes()[i], 0xFF) << "offset " << i;
  }
}

TEST(BuildMask, RejectsOutOfRangeN) {
  EXPECT_THROW(PacketMask(reference_layout(), 16), ParameterError);
  EXPECT_NO_THROW(PacketMask(reference_layout(), 15));
}

TEST(ApplyMask, KnownValues) {
  const PacketLayout& layout = reference_layout();
  Bytes packet = blank_packet(layout);
  write_field(packet, layout.range_fields()[0], 2871);

  const Bytes masked2 = apply_mask(packet, PacketMask(layout, 2));
  EXPECT_EQ(read_field(masked2, layout.range_fields()[0]), 2868u);

  const Bytes masked4 = apply_mask(packet, PacketMask(layout, 4));
  EXPECT_EQ(read_field(masked4, layout.range_fields()[0]), 2864u);
  // 7 raw units = 14 mm, within the strict bound 2^4 * 2 = 32 mm.
  const double err_mm = (2871 - 2864) * layout.step_size_mm();
  EXPECT_DOUBLE_EQ(err_mm, 14.0);
  EXPECT_LT(err_mm, error_bound(4, layout.step_size_mm()).strict_bound_mm);
}

TEST(ApplyMask, LengthMismatchThrows) {
  const Bytes packet(100, 0);
  EXPECT_THROW(apply_mask(packet, PacketMask(reference_layout(), 4)), StructuralError);
}

TEST(ApplyMask, Idempotent) {
  std::mt19937 rng(2);
  for (unsigned n : {0u, 1u, 4u, 8u, 15u}) {
    const PacketMask mask(reference_layout(), n);
    const Bytes packet = random_packet(reference_layout(), rng);
    const Bytes once = apply_mask(packet, mask);
    EXPECT_EQ(apply_mask(once, mask), once);
  }
}

// Exhaustive over all 2^16 raw values for every n: masked <= original,
// error within [0, 2^n - 1], bound attained, zero fixed.
TEST(ApplyMask, ExhaustiveErrorBoundAllN) {
  const PacketLayout layout(2, {{0, 16, ByteOrder::kLsbFirst}}, 2.0, 15, 30.0);
  for (unsigned n = 0; n <= 15; ++n) {
    const PacketMask mask(layout, n);
    const std::uint32_t max_err = (1u << n) - 1;
    std::uint32_t observed_max = 0;
    Bytes packet(2);
    for (std::uint32_t raw = 0; raw <= 0xFFFF; ++raw) {
      write_field(packet, layout.range_fields()[0], raw);
      apply_mask_inplace(packet, mask);
      const std::uint32_t masked = read_field(packet, layout.range_fields()[0]);
      ASSERT_LE(masked, raw);
      const std::uint32_t err = raw - masked;
      ASSERT_LE(err, max_err);
      ASSERT_EQ(masked, truncate_oracle(raw, n));
      observed_max = std::max(observed_max, err);
    }
    EXPECT_EQ(observed_max, max_err) << "bound not attained for n=" << n;
    // Null return stays a null return.
    write_field(packet, layout.range_fields()[0], 0);
    apply_mask_inplace(packet, mask);
    EXPECT_EQ(read_field(packet, layout.range_fields()[0]), 0u);
  }
}

// Bytes outside range fields are untouched, and the structural verdict
// is unchanged by masking.
TEST(ApplyMask, StructurePreserved) {
  const PacketLayout& layout = reference_layout();
  std::mt19937 rng(4);
  std::vector<bool> is_range_byte(layout.packet_size(), false);
  for (const auto& f : layout.range_fields()) {
    for (std::uint32_t i = 0; i < f.width_bytes(); ++i) is_range_byte[f.offset + i] = true;
  }
  for (unsigned n : {1u, 4u, 8u, 15u}) {
    const PacketMask mask(layout, n);
    for (int trial = 0; trial < 25; ++trial) {
      const Bytes packet = random_packet(layout, rng);
      const Bytes masked = apply_mask(packet, mask);
      for (std::uint32_t i = 0; i < layout.packet_size(); ++i) {
        if (!is_range_byte[i]) ASSERT_EQ(masked[i], packet[i]) << "offset " << i;
      }
      EXPECT_EQ(validate_packet(masked, layout).ok, validate_packet(packet, layout).ok);
    }
  }
}

TEST(ApplyMaskBatch, MatchesScalarPath) {
  const PacketLayout& layout = reference_layout();
  std::mt19937 rng(6);
  for (unsigned n : {0u, 4u, 9u}) {
    const PacketMask mask(layout, n);
    const Bytes stream = testutil::random_stream(layout, 3, rng);

    Bytes batch = stream;
    apply_mask_batch(batch, mask);

    Bytes scalar;
    for (std::size_t pos = 0; pos < stream.size(); pos += layout.packet_size()) {
      const Bytes one = apply_mask(
          ByteSpan(stream.data() + pos, layout.packet_size()), mask);
      scalar.insert(scalar.end(), one.begin(), one.end());
    }
    EXPECT_EQ(batch, scalar);
  }
}

TEST(ApplyMaskBatch, IdenticalPacketsStayIdentical) {
  const PacketLayout& layout = reference_layout();
  std::mt19937 rng(8);
  const Bytes one = random_packet(layout, rng);
  Bytes buffer;
  for (int i = 0; i < 1000; ++i) buffer.insert(buffer.end(), one.begin(), one.end());

  const PacketMask mask(layout, 4);
  apply_mask_batch(buffer, mask);
  const Bytes expected = apply_mask(one, mask);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(ByteSpan(buffer.data() + i * layout.packet_size(), layout.packet_size()).back(),
              expected.back());
    ASSERT_TRUE(std::equal(expected.begin(), expected.end(),
                           buffer.begin() + static_cast<std::ptrdiff_t>(i) * layout.packet_size()));
  }
}

TEST(ApplyMaskBatch, EmptyBufferIsNoop) {
  Bytes empty;
  EXPECT_NO_THROW(apply_mask_batch(empty, PacketMask(reference_layout(), 4)));
  EXPECT_TRUE(empty.empty());
}

TEST(ApplyMaskBatch, NonMultipleLengthThrows) {
  Bytes buffer(1206 * 2 + 1, 0);
  EXPECT_THROW(apply_mask_batch(buffer, PacketMask(reference_layout(), 4)), StructuralError);
}

TEST(ErrorBoundMath, PaperValues) {
  // n = 8 at 2 mm step: attainable maximum is exactly 510 mm.
  EXPECT_DOUBLE_EQ(error_bound(8, 2.0).attainable_max_mm, 510.0);
  EXPECT_DOUBLE_EQ(error_bound(8, 2.0).strict_bound_mm, 512.0);
  // n = 0: no error at all.
  EXPECT_DOUBLE_EQ(error_bound(0, 2.0).attainable_max_mm, 0.0);
  // n = 4 at 2 mm equals the vendor's +-3 cm band.
  EXPECT_DOUBLE_EQ(error_bound(4, 2.0).attainable_max_mm, 30.0);
  EXPECT_DOUBLE_EQ(error_bound(4, 2.0).attainable_max_mm,
                   reference_layout().vendor_accuracy_mm());
}

}  // namespace
}  // namespace lmc
