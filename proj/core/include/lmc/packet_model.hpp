// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lmc/bytes.hpp"

namespace lmc {

enum class ByteOrder : std::uint8_t {
  kLsbFirst = 0,  // least significant byte at the lowest offset
  kMsbFirst = 1,
};

/// Location and encoding of one raw range value inside a packet.
struct RangeFieldSpec {
  std::uint32_t offset = 0;
  std::uint8_t width_bits = 16;  // 8, 16 or 32
  ByteOrder byte_order = ByteOrder::kLsbFirst;

  std::uint32_t width_bytes() const { return width_bits / 8u; }
};

/// Bytes that must hold a fixed sentinel value in a well-formed packet,
/// e.g. the per-block 0xFF 0xEE flag of the reference sensor.
struct ConstantFieldSpec {
  std::uint32_t offset = 0;
  Bytes expected;
};

/// Declarative description of where range measurements live inside a
/// fixed-size sensor packet. Immutable once constructed; construction
/// validates that fields are in bounds, sorted and non-overlapping.
class PacketLayout {
 public:
  PacketLayout(std::uint32_t packet_size, std::vector<RangeFieldSpec> range_fields,
               double step_size_mm, std::uint8_t max_masked_bits, double vendor_accuracy_mm,
               std::vector<ConstantFieldSpec> constant_fields = {});

  std::uint32_t packet_size() const { return packet_size_; }
  const std::vector<RangeFieldSpec>& range_fields() const { return range_fields_; }
  double step_size_mm() const { return step_size_mm_; }
  std::uint8_t max_masked_bits() const { return max_masked_bits_; }
  double vendor_accuracy_mm() const { return vendor_accuracy_mm_; }
  const std::vector<ConstantFieldSpec>& constant_fields() const { return constant_fields_; }

  /// Step size in whole micrometers, as stored in stream headers.
  std::uint32_t step_size_um() const;

  /// Stable 64-bit identity hash over the canonical layout encoding.
  /// Equal layouts hash equal on every platform and run.
  std::uint64_t hash() const { return hash_; }

 private:
  std::uint32_t packet_size_;
  std::vector<RangeFieldSpec> range_fields_;
  double step_size_mm_;
  std::uint8_t max_masked_bits_;
  double vendor_accuracy_mm_;
  std::vector<ConstantFieldSpec> constant_fields_;
  std::uint64_t hash_;
};

/// One decoded range measurement.
struct Measurement {
  std::uint32_t raw = 0;        // raw integer value; 0 = null return (no echo)
  double distance_mm = 0.0;     // raw * step_size_mm
  std::uint32_t field_index = 0;

  bool is_null_return() const { return raw == 0; }
};

/// Result of validate_packet. A report, not an exception.
struct ValidationReport {
  bool ok = true;
  std::uint32_t first_bad_offset = 0;
  std::string reason;  // empty when ok
};

/// The built-in VLP-16-style layout: 1206-byte packets, 12 blocks of
/// 100 bytes (2-byte 0xFF 0xEE flag, 2-byte azimuth, 32 x [2-byte range
/// LSB-first + 1-byte reflectivity]), then a 4-byte timestamp and a
/// 2-byte factory field. 384 range fields, 2 mm step, +-30 mm vendor
/// accuracy, at most 15 maskable bits.
const PacketLayout& reference_layout();

/// Decodes the raw value of one range field. No bounds check beyond the
/// layout's own invariant.
std::uint32_t read_field(ByteSpan packet, const RangeFieldSpec& field);

/// Encodes a raw value into one range field (used to synthesize packets).
/// Values wider than the field throw ParameterError.
void write_field(MutableByteSpan packet, const RangeFieldSpec& field, std::uint32_t raw);

/// Returns one Measurement per range field, in layout order. Throws
/// StructuralError if the packet length does not match the layout.
std::vector<Measurement> extract_measurements(ByteSpan packet, const PacketLayout& layout);

/// Checks length and the layout's constant fields. Never throws.
ValidationReport validate_packet(ByteSpan packet, const PacketLayout& layout);

/// JSON layout descriptor, for sensors other than the built-in one.
PacketLayout layout_from_json(const std::string& text);
std::string layout_to_json(const PacketLayout& layout);

}  // namespace lmc
