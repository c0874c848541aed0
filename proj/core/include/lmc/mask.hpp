// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "lmc/bytes.hpp"
#include "lmc/packet_model.hpp"

namespace lmc {

/// Precomputed whole-packet bit mask for a given (layout, n). Every byte
/// outside a range field is 0xFF; inside a range field exactly the n
/// least significant bits of the value are 0. Build once, apply to every
/// packet of the stream.
///
/// Immutable after construction; safe to share across threads.
class PacketMask {
 public:
  /// Throws ParameterError unless 0 <= masked_bits <= layout.max_masked_bits().
  PacketMask(const PacketLayout& layout, unsigned masked_bits);

  ByteSpan bytes() const { return bytes_; }
  unsigned masked_bits() const { return masked_bits_; }
  std::uint64_t layout_hash() const { return layout_hash_; }
  std::size_t size() const { return bytes_.size(); }

 private:
  Bytes bytes_;
  unsigned masked_bits_;
  std::uint64_t layout_hash_;
};

/// out[i] = packet[i] AND mask[i]. Throws StructuralError on length mismatch.
Bytes apply_mask(ByteSpan packet, const PacketMask& mask);

/// In-place variant of apply_mask.
void apply_mask_inplace(MutableByteSpan packet, const PacketMask& mask);

/// Masks a contiguous buffer of whole packets in place, one linear pass
/// through word-wide ANDs. Byte-equivalent to apply_mask on each packet.
/// Throws StructuralError if the buffer is not a whole multiple of the
/// mask length.
void apply_mask_batch(MutableByteSpan buffer, const PacketMask& mask);

/// Worst-case measurement error caused by masking n bits at step size s.
struct ErrorBound {
  double attainable_max_mm = 0.0;  // (2^n - 1) * s, reached by raw values ending in n ones
  double strict_bound_mm = 0.0;    // 2^n * s, the open upper bound
};

ErrorBound error_bound(unsigned masked_bits, double step_size_mm);

}  // namespace lmc
