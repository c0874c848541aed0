// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lmc/packet_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lmc/error.hpp"

namespace lmc {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

void fnv_append(std::uint64_t& h, std::uint64_t value, unsigned bytes) {
  for (unsigned i = 0; i < bytes; ++i) {
    h ^= static_cast<std::uint8_t>(value >> (8 * i));
    h *= kFnvPrime;
  }
}

std::uint64_t layout_hash(std::uint32_t packet_size, const std::vector<RangeFieldSpec>& fields,
                          std::uint32_t step_um, std::uint8_t max_masked_bits,
                          const std::vector<ConstantFieldSpec>& constants) {
  std::uint64_t h = kFnvOffset;
  fnv_append(h, packet_size, 4);
  fnv_append(h, step_um, 4);
  fnv_append(h, max_masked_bits, 1);
  fnv_append(h, fields.size(), 4);
  for (const auto& f : fields) {
    fnv_append(h, f.offset, 4);
    fnv_append(h, f.width_bits, 1);
    fnv_append(h, static_cast<std::uint8_t>(f.byte_order), 1);
  }
  fnv_append(h, constants.size(), 4);
  for (const auto& c : constants) {
    fnv_append(h, c.offset, 4);
    fnv_append(h, c.expected.size(), 4);
    for (std::uint8_t b : c.expected) fnv_append(h, b, 1);
  }
  return h;
}

}  // namespace

PacketLayout::PacketLayout(std::uint32_t packet_size, std::vector<RangeFieldSpec> range_fields,
                           double step_size_mm, std::uint8_t max_masked_bits,
                           double vendor_accuracy_mm,
                           std::vector<ConstantFieldSpec> constant_fields)
    : packet_size_(packet_size),
      range_fields_(std::move(range_fields)),
      step_size_mm_(step_size_mm),
      max_masked_bits_(max_masked_bits),
      vendor_accuracy_mm_(vendor_accuracy_mm),
      constant_fields_(std::move(constant_fields)) {
  if (packet_size_ == 0) throw ParameterError("packet_size must be positive");
  if (!(step_size_mm_ > 0.0)) throw ParameterError("step_size_mm must be positive");

  std::uint64_t prev_end = 0;
  for (std::size_t i = 0; i < range_fields_.size(); ++i) {
    const auto& f = range_fields_[i];
    if (f.width_bits != 8 && f.width_bits != 16 && f.width_bits != 32) {
      throw ParameterError("range field width must be 8, 16 or 32 bits");
    }
    const std::uint64_t end = static_cast<std::uint64_t>(f.offset) + f.width_bytes();
    if (end > packet_size_) {
      throw ParameterError("range field extends past the packet");
    }
    if (i > 0 && f.offset < prev_end) {
      throw ParameterError("range fields must be sorted by offset and non-overlapping");
    }
    if (max_masked_bits_ >= f.width_bits) {
      throw ParameterError("max_masked_bits must be below the narrowest field width");
    }
    prev_end = end;
  }
  for (const auto& c : constant_fields_) {
    if (static_cast<std::uint64_t>(c.offset) + c.expected.size() > packet_size_) {
      throw ParameterError("constant field extends past the packet");
    }
  }
  hash_ = layout_hash(packet_size_, range_fields_, step_size_um(), max_masked_bits_,
                      constant_fields_);
}

std::uint32_t PacketLayout::step_size_um() const {
  return static_cast<std::uint32_t>(std::llround(step_size_mm_ * 1000.0));
}

const PacketLayout& reference_layout() {
  static const PacketLayout layout = [] {
    constexpr std::uint32_t kBlocks = 12;
    constexpr std::uint32_t kBlockSize = 100;
    constexpr std::uint32_t kChannels = 32;

    std::vector<RangeFieldSpec> fields;
    fields.reserve(kBlocks * kChannels);
    std::vector<ConstantFieldSpec> constants;
    constants.reserve(kBlocks);

    for (std::uint32_t b = 0; b < kBlocks; ++b) {
      const std::uint32_t block = b * kBlockSize;
      // 2-byte flag, stored on the wire as 0xFF 0xEE.
      constants.push_back({block, {0xFF, 0xEE}});
      // 2-byte azimuth, then 32 channels of 2-byte range + 1-byte reflectivity.
      for (std::uint32_t c = 0; c < kChannels; ++c) {
        fields.push_back({block + 4 + c * 3, 16, ByteOrder::kLsbFirst});
      }
    }
    // Trailing 4-byte timestamp and 2-byte factory field occupy 1200..1205.
    return PacketLayout(1206, std::move(fields), 2.0, 15, 30.0, std::move(constants));
  }();
  return layout;
}

std::uint32_t read_field(ByteSpan packet, const RangeFieldSpec& field) {
  const std::uint8_t* p = packet.data() + field.offset;
  const unsigned n = field.width_bytes();
  std::uint32_t value = 0;
  if (field.byte_order == ByteOrder::kLsbFirst) {
    for (unsigned i = 0; i < n; ++i) value |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  } else {
    for (unsigned i = 0; i < n; ++i) value = (value << 8) | p[i];
  }
  return value;
}

void write_field(MutableByteSpan packet, const RangeFieldSpec& field, std::uint32_t raw) {
  if (field.width_bits < 32 && raw >= (1u << field.width_bits)) {
    throw ParameterError("raw value does not fit the field width");
  }
  std::uint8_t* p = packet.data() + field.offset;
  const unsigned n = field.width_bytes();
  if (field.byte_order == ByteOrder::kLsbFirst) {
    for (unsigned i = 0; i < n; ++i) p[i] = static_cast<std::uint8_t>(raw >> (8 * i));
  } else {
    for (unsigned i = 0; i < n; ++i) p[i] = static_cast<std::uint8_t>(raw >> (8 * (n - 1 - i)));
  }
}

std::vector<Measurement> extract_measurements(ByteSpan packet, const PacketLayout& layout) {
  if (packet.size() != layout.packet_size()) {
    std::ostringstream msg;
    msg << "packet is " << packet.size() << " bytes, layout expects " << layout.packet_size();
    throw StructuralError(msg.str());
  }
  std::vector<Measurement> out;
  out.reserve(layout.range_fields().size());
  const double step = layout.step_size_mm();
  for (std::size_t i = 0; i < layout.range_fields().size(); ++i) {
    const std::uint32_t raw = read_field(packet, layout.range_fields()[i]);
    out.push_back({raw, raw * step, static_cast<std::uint32_t>(i)});
  }
  return out;
}

ValidationReport validate_packet(ByteSpan packet, const PacketLayout& layout) {
  if (packet.size() != layout.packet_size()) {
    std::ostringstream msg;
    msg << "length mismatch: " << packet.size() << " != " << layout.packet_size();
    return {false, 0, msg.str()};
  }
  for (const auto& c : layout.constant_fields()) {
    for (std::size_t i = 0; i < c.expected.size(); ++i) {
      if (packet[c.offset + i] != c.expected[i]) {
        std::ostringstream msg;
        msg << "constant field mismatch at offset " << (c.offset + i);
        return {false, static_cast<std::uint32_t>(c.offset + i), msg.str()};
      }
    }
  }
  return {};
}

}  // namespace lmc
