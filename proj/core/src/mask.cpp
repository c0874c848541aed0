// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lmc/mask.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "lmc/error.hpp"

namespace lmc {

PacketMask::PacketMask(const PacketLayout& layout, unsigned masked_bits)
    : masked_bits_(masked_bits), layout_hash_(layout.hash()) {
  if (masked_bits > layout.max_masked_bits()) {
    std::ostringstream msg;
    msg << "masked_bits " << masked_bits << " exceeds layout bound "
        << static_cast<unsigned>(layout.max_masked_bits());
    throw ParameterError(msg.str());
  }
  bytes_.assign(layout.packet_size(), 0xFF);
  // Zero the n low bits of each range field; everything else stays 0xFF.
  for (const auto& field : layout.range_fields()) {
    const std::uint64_t value_mask = (~std::uint64_t{0} << masked_bits);
    write_field(bytes_, field,
                static_cast<std::uint32_t>(value_mask & ((std::uint64_t{1} << field.width_bits) - 1)));
  }
}

Bytes apply_mask(ByteSpan packet, const PacketMask& mask) {
  Bytes out(packet.begin(), packet.end());
  apply_mask_inplace(out, mask);
  return out;
}

void apply_mask_inplace(MutableByteSpan packet, const PacketMask& mask) {
  if (packet.size() != mask.size()) {
    throw StructuralError("packet length does not match mask length");
  }
  const std::uint8_t* m = mask.bytes().data();
  std::uint8_t* p = packet.data();
  for (std::size_t i = 0; i < packet.size(); ++i) p[i] &= m[i];
}

void apply_mask_batch(MutableByteSpan buffer, const PacketMask& mask) {
  const std::size_t n = mask.size();
  if (n == 0 || buffer.size() % n != 0) {
    throw StructuralError("buffer length is not a whole multiple of the mask length");
  }
  const std::uint8_t* m = mask.bytes().data();
  const std::size_t words = n / sizeof(std::uint64_t);
  const std::size_t tail = n % sizeof(std::uint64_t);

  std::uint8_t* p = buffer.data();
  const std::uint8_t* end = p + buffer.size();
  while (p != end) {
    // Word-wide AND; memcpy keeps the loads/stores alignment-safe and
    // compiles to plain 64-bit (or vectorized) moves.
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t pv, mv;
      std::memcpy(&pv, p + w * 8, 8);
      std::memcpy(&mv, m + w * 8, 8);
      pv &= mv;
      std::memcpy(p + w * 8, &pv, 8);
    }
    for (std::size_t i = n - tail; i < n; ++i) p[i] &= m[i];
    p += n;
  }
}

ErrorBound error_bound(unsigned masked_bits, double step_size_mm) {
  const double levels = std::ldexp(1.0, static_cast<int>(masked_bits));  // 2^n
  return {(levels - 1.0) * step_size_mm, levels * step_size_mm};
}

}  // namespace lmc
