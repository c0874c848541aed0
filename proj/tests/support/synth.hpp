// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "lmc/bytes.hpp"
#include "lmc/capture.hpp"
#include "lmc/packet_model.hpp"

namespace lmc::testutil {

/// A structurally valid packet: constant fields set, everything else zero.
Bytes blank_packet(const PacketLayout& layout);

/// Structurally valid packet with random azimuths/reflectivity/timestamp
/// bytes and uniformly random range values (plus some null returns).
Bytes random_packet(const PacketLayout& layout, std::mt19937& rng);

/// N packets of uniformly random content, concatenated.
Bytes random_stream(const PacketLayout& layout, std::size_t packets, std::mt19937& rng);

/// Stream whose raw range values cover all residues modulo 2^bits
/// uniformly (never zero), for closed-form error statistics.
Bytes uniform_residue_stream(const PacketLayout& layout, std::size_t packets, unsigned bits);

/// Scene-like stream: smooth per-channel range profiles that drift as the
/// sensor rotates, plus small integer noise and occasional null returns.
/// Compressible, and masking removes the noise bits first.
Bytes structured_stream(const PacketLayout& layout, std::size_t packets, std::uint32_t seed);

struct PcapOptions {
  bool byte_swapped = false;
  bool nanosecond = false;
  std::uint32_t link_type = 1;  // Ethernet
};

/// Synthetic pcap capture builder for reader tests.
class PcapBuilder {
 public:
  explicit PcapBuilder(PcapOptions options = {});

  /// Appends a UDP/IPv4/Ethernet record carrying `payload`.
  void add_udp(std::uint16_t dst_port, ByteSpan payload, Timestamp ts);

  /// Appends a (non-IP) ARP record.
  void add_arp(Timestamp ts);

  /// Appends a fragmented UDP record (should be skipped by the reader).
  void add_fragmented_udp(std::uint16_t dst_port, ByteSpan payload, Timestamp ts);

  const Bytes& bytes() const { return out_; }

 private:
  void add_record(ByteSpan frame, Timestamp ts);
  std::uint32_t fix32(std::uint32_t v) const;
  void push32(std::uint32_t v);

  PcapOptions options_;
  Bytes out_;
};

/// Builds the Ethernet+IPv4+UDP wrapping used by PcapBuilder.
Bytes udp_frame(std::uint16_t dst_port, ByteSpan payload, bool fragmented = false);

}  // namespace lmc::testutil
