// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lmc/packet_model.hpp"

#include <gtest/gtest.h>

#include <random>

#include "lmc/error.hpp"
#include "synth.hpp"

namespace lmc {
namespace {

using testutil::blank_packet;
using testutil::random_packet;

TEST(ReferenceLayout, Constants) {
  const PacketLayout& layout = reference_layout();
  EXPECT_EQ(layout.packet_size(), 1206u);
  EXPECT_EQ(layout.range_fields().size(), 384u);  // 12 blocks x 32 channels
  EXPECT_DOUBLE_EQ(layout.step_size_mm(), 2.0);
  EXPECT_DOUBLE_EQ(layout.vendor_accuracy_mm(), 30.0);
  EXPECT_EQ(layout.max_masked_bits(), 15);
  EXPECT_EQ(layout.step_size_um(), 2000u);
}

TEST(ReferenceLayout, FieldOffsets) {
  const PacketLayout& layout = reference_layout();
  // First range field sits after the 2-byte flag and 2-byte azimuth.
  EXPECT_EQ(layout.range_fields()[0].offset, 4u);
  EXPECT_EQ(layout.range_fields()[0].width_bits, 16);
  EXPECT_EQ(layout.range_fields()[0].byte_order, ByteOrder::kLsbFirst);
  // Channel c of block b lives at b*100 + 4 + c*3.
  for (std::size_t b = 0; b < 12; ++b) {
    for (std::size_t c = 0; c < 32; ++c) {
      EXPECT_EQ(layout.range_fields()[b * 32 + c].offset, b * 100 + 4 + c * 3);
    }
  }
  // Block flags on the wire are 0xFF 0xEE.
  ASSERT_EQ(layout.constant_fields().size(), 12u);
  EXPECT_EQ(layout.constant_fields()[0].offset, 0u);
  EXPECT_EQ(layout.constant_fields()[0].expected, (Bytes{0xFF, 0xEE}));
  EXPECT_EQ(layout.constant_fields()[11].offset, 1100u);
}

TEST(LayoutInvariants, RejectBadLayouts) {
  EXPECT_THROW(PacketLayout(100, {{99, 16, ByteOrder::kLsbFirst}}, 2.0, 15, 30.0),
               ParameterError);  // field past the end
  EXPECT_THROW(PacketLayout(100, {{4, 16}, {5, 16}}, 2.0, 15, 30.0),
               ParameterError);  // overlapping
  EXPECT_THROW(PacketLayout(100, {{8, 16}, {4, 16}}, 2.0, 15, 30.0),
               ParameterError);  // unsorted
  EXPECT_THROW(PacketLayout(100, {{4, 12}}, 2.0, 11, 30.0), ParameterError);  // odd width
  EXPECT_THROW(PacketLayout(100, {{4, 16}}, 0.0, 15, 30.0), ParameterError);  // zero step
  EXPECT_THROW(PacketLayout(100, {{4, 16}}, 2.0, 16, 30.0),
               ParameterError);  // cannot mask the whole field
}

TEST(LayoutHash, StableAndDiscriminating) {
  const PacketLayout& ref = reference_layout();
  EXPECT_EQ(ref.hash(), reference_layout().hash());
  const PacketLayout other(1206, {{4, 16, ByteOrder::kLsbFirst}}, 2.0, 15, 30.0);
  EXPECT_NE(ref.hash(), other.hash());
  const PacketLayout step_changed(1206, {{4, 16, ByteOrder::kLsbFirst}}, 4.0, 15, 30.0);
  EXPECT_NE(other.hash(), step_changed.hash());
}

TEST(ExtractMeasurements, DecodesLsbFirst) {
  const PacketLayout& layout = reference_layout();
  Bytes packet = blank_packet(layout);
  packet[4] = 0x37;  // first range field, LSB first
  packet[5] = 0x0B;
  const auto m = extract_measurements(packet, layout);
  ASSERT_EQ(m.size(), 384u);
  EXPECT_EQ(m[0].raw, 2871u);
  EXPECT_DOUBLE_EQ(m[0].distance_mm, 5742.0);
  EXPECT_EQ(m[0].field_index, 0u);
  EXPECT_FALSE(m[0].is_null_return());
}

TEST(ExtractMeasurements, AllZeroPacketIsAllNullReturns) {
  const PacketLayout& layout = reference_layout();
  const Bytes packet(layout.packet_size(), 0);
  const auto m = extract_measurements(packet, layout);
  ASSERT_EQ(m.size(), layout.range_fields().size());
  for (const auto& meas : m) {
    EXPECT_EQ(meas.raw, 0u);
    EXPECT_TRUE(meas.is_null_return());
  }
}

TEST(ExtractMeasurements, WrongLengthIsStructuralError) {
  const Bytes packet(1205, 0);
  EXPECT_THROW(extract_measurements(packet, reference_layout()), StructuralError);
}

TEST(ExtractMeasurements, PureRead) {
  std::mt19937 rng(7);
  const Bytes packet = random_packet(reference_layout(), rng);
  const Bytes before = packet;
  (void)extract_measurements(packet, reference_layout());
  EXPECT_EQ(packet, before);
}

TEST(FieldCodec, RoundTripAllWidthsAndOrders) {
  std::mt19937 rng(11);
  for (std::uint8_t width : {std::uint8_t{8}, std::uint8_t{16}, std::uint8_t{32}}) {
    for (ByteOrder order : {ByteOrder::kLsbFirst, ByteOrder::kMsbFirst}) {
      const RangeFieldSpec field{1, width, order};
      Bytes buf(8, 0xAA);
      for (int i = 0; i < 200; ++i) {
        const std::uint32_t raw =
            width == 32 ? rng() : rng() % (1u << width);
        write_field(buf, field, raw);
        EXPECT_EQ(read_field(buf, field), raw);
      }
    }
  }
}

TEST(FieldCodec, MsbFirstLayoutDecodes) {
  const PacketLayout layout(8, {{2, 16, ByteOrder::kMsbFirst}}, 2.0, 15, 30.0);
  Bytes packet(8, 0);
  packet[2] = 0x0B;
  packet[3] = 0x37;
  EXPECT_EQ(extract_measurements(packet, layout)[0].raw, 2871u);
}

TEST(FieldCodec, WriteRejectsOverflow) {
  const RangeFieldSpec field{0, 8, ByteOrder::kLsbFirst};
  Bytes buf(4, 0);
  EXPECT_THROW(write_field(buf, field, 256), ParameterError);
}

TEST(ValidatePacket, WellFormedPasses) {
  std::mt19937 rng(3);
  const Bytes packet = random_packet(reference_layout(), rng);
  const auto report = validate_packet(packet, reference_layout());
  EXPECT_TRUE(report.ok);
  EXPECT_TRUE(report.reason.empty());
}

TEST(ValidatePacket, CorruptedFlagFailsAtOffset) {
  Bytes packet = blank_packet(reference_layout());
  packet[301] = 0x00;  // second byte of block 3's flag
  const auto report = validate_packet(packet, reference_layout());
  EXPECT_FALSE(report.ok);
  EXPECT_EQ(report.first_bad_offset, 301u);
}

TEST(ValidatePacket, ShortPacketFailsOnLength) {
  const Bytes packet(100, 0);
  const auto report = validate_packet(packet, reference_layout());
  EXPECT_FALSE(report.ok);
  EXPECT_NE(report.reason.find("length"), std::string::npos);
}

TEST(MeasurementCount, MatchesLayoutForAnyPacket) {
  std::mt19937 rng(5);
  for (int i = 0; i < 50; ++i) {
    const Bytes packet = random_packet(reference_layout(), rng);
    EXPECT_EQ(extract_measurements(packet, reference_layout()).size(),
              reference_layout().range_fields().size());
  }
}

// Writing every decoded value back into a copy reproduces the original
// bytes: parse and serialize are exact inverses.
TEST(RoundTrip, ReencodeReproducesPacket) {
  std::mt19937 rng(13);
  for (int i = 0; i < 20; ++i) {
    const Bytes packet = random_packet(reference_layout(), rng);
    const auto measurements = extract_measurements(packet, reference_layout());
    Bytes rebuilt = packet;
    for (const auto& m : measurements) {
      write_field(rebuilt, reference_layout().range_fields()[m.field_index], m.raw);
    }
    EXPECT_EQ(rebuilt, packet);
  }
}

TEST(LayoutJson, RoundTrip) {
  const PacketLayout& ref = reference_layout();
  const PacketLayout parsed = layout_from_json(layout_to_json(ref));
  EXPECT_EQ(parsed.hash(), ref.hash());
  EXPECT_EQ(parsed.packet_size(), ref.packet_size());
  EXPECT_EQ(parsed.range_fields().size(), ref.range_fields().size());
  EXPECT_DOUBLE_EQ(parsed.step_size_mm(), ref.step_size_mm());
}

TEST(LayoutJson, RejectsGarbage) {
  EXPECT_THROW(layout_from_json("not json"), FormatError);
  EXPECT_THROW(layout_from_json("{\"packet_size\": 100}"), FormatError);
}

}  // namespace
}  // namespace lmc
