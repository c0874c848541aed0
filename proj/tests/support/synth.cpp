// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace lmc::testutil {

Bytes blank_packet(const PacketLayout& layout) {
  Bytes packet(layout.packet_size(), 0);
  for (const auto& c : layout.constant_fields()) {
    std::memcpy(packet.data() + c.offset, c.expected.data(), c.expected.size());
  }
  return packet;
}

Bytes random_packet(const PacketLayout& layout, std::mt19937& rng) {
  Bytes packet(layout.packet_size());
  for (auto& b : packet) b = static_cast<std::uint8_t>(rng());
  for (const auto& c : layout.constant_fields()) {
    std::memcpy(packet.data() + c.offset, c.expected.data(), c.expected.size());
  }
  // ~3% null returns, like a real scene with missed echoes.
  std::uniform_int_distribution<int> null_dist(0, 31);
  for (const auto& f : layout.range_fields()) {
    if (null_dist(rng) == 0) write_field(packet, f, 0);
  }
  return packet;
}

Bytes random_stream(const PacketLayout& layout, std::size_t packets, std::mt19937& rng) {
  Bytes out;
  out.reserve(packets * layout.packet_size());
  for (std::size_t i = 0; i < packets; ++i) {
    const Bytes p = random_packet(layout, rng);
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

Bytes uniform_residue_stream(const PacketLayout& layout, std::size_t packets, unsigned bits) {
  const std::uint32_t modulus = 1u << bits;
  Bytes out;
  out.reserve(packets * layout.packet_size());
  std::uint32_t k = 0;
  for (std::size_t i = 0; i < packets; ++i) {
    Bytes packet = blank_packet(layout);
    for (const auto& f : layout.range_fields()) {
      // Base well above zero so no value is a null return.
      write_field(packet, f, 4 * modulus + (k++ % modulus));
    }
    out.insert(out.end(), packet.begin(), packet.end());
  }
  return out;
}

Bytes structured_stream(const PacketLayout& layout, std::size_t packets, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> noise(0.0, 2.5);
  std::uniform_int_distribution<int> null_dist(0, 99);

  Bytes out;
  out.reserve(packets * layout.packet_size());
  const std::size_t fields = layout.range_fields().size();
  double azimuth = 0.0;

  for (std::size_t i = 0; i < packets; ++i) {
    Bytes packet = blank_packet(layout);
    // Azimuth advances ~0.2 deg per block at 10 Hz; write it into the two
    // bytes after each constant flag so the non-range bytes look real.
    for (std::size_t c = 0; c < layout.constant_fields().size(); ++c) {
      const auto& flag = layout.constant_fields()[c];
      azimuth += 20.0;
      if (azimuth >= 36000.0) azimuth -= 36000.0;
      const std::uint16_t az = static_cast<std::uint16_t>(azimuth);
      if (flag.offset + 4 <= layout.packet_size()) {
        packet[flag.offset + 2] = static_cast<std::uint8_t>(az);
        packet[flag.offset + 3] = static_cast<std::uint8_t>(az >> 8);
      }
    }
    for (std::size_t jf = 0; jf < fields; ++jf) {
      const auto& f = layout.range_fields()[jf];
      if (null_dist(rng) < 4) {
        write_field(packet, f, 0);
        continue;
      }
      // Smooth room-like profile: a few meters, slowly varying with the
      // firing direction and the channel, plus sub-centimeter noise.
      const double channel = static_cast<double>(jf % 32);
      const double phase = azimuth / 36000.0 * 2.0 * 3.141592653589793;
      const double base_mm = 4000.0 + 2500.0 * std::sin(phase + channel * 0.19) +
                             600.0 * std::sin(3.0 * phase) + channel * 35.0;
      const double raw = base_mm / layout.step_size_mm() + noise(rng);
      const double max_raw = static_cast<double>((1ull << f.width_bits) - 1);
      write_field(packet, f,
                  static_cast<std::uint32_t>(std::clamp(raw, 1.0, max_raw)));
    }
    out.insert(out.end(), packet.begin(), packet.end());
  }
  return out;
}

Bytes udp_frame(std::uint16_t dst_port, ByteSpan payload, bool fragmented) {
  Bytes frame(14 + 20 + 8 + payload.size());
  // Ethernet
  static constexpr std::uint8_t kMac[6] = {0x02, 0, 0, 0, 0, 0x11};
  std::memcpy(&frame[0], kMac, 6);
  std::memcpy(&frame[6], kMac, 6);
  store_be16(&frame[12], 0x0800);
  // IPv4
  std::uint8_t* ip = &frame[14];
  ip[0] = 0x45;
  store_be16(ip + 2, static_cast<std::uint16_t>(20 + 8 + payload.size()));
  if (fragmented) store_be16(ip + 6, 0x2000);  // more-fragments
  ip[8] = 64;
  ip[9] = 17;
  ip[12] = 10;
  ip[15] = 1;
  ip[16] = 10;
  ip[19] = 2;
  // UDP
  std::uint8_t* udp = ip + 20;
  store_be16(udp + 0, 55555);
  store_be16(udp + 2, dst_port);
  store_be16(udp + 4, static_cast<std::uint16_t>(8 + payload.size()));
  std::memcpy(udp + 8, payload.data(), payload.size());
  return frame;
}

PcapBuilder::PcapBuilder(PcapOptions options) : options_(options) {
  std::uint32_t magic = options_.nanosecond ? 0xA1B23C4D : 0xA1B2C3D4;
  // The global header is written in the file's own byte order; fix32
  // handles the swapping for every 32-bit field, including the magic.
  push32(fix32(magic));
  if (options_.byte_swapped) {
    // version 2.4 as two big-endian u16 halves
    out_.push_back(0);
    out_.push_back(2);
    out_.push_back(0);
    out_.push_back(4);
  } else {
    out_.push_back(2);
    out_.push_back(0);
    out_.push_back(4);
    out_.push_back(0);
  }
  push32(fix32(0));      // thiszone
  push32(fix32(0));      // sigfigs
  push32(fix32(65535));  // snaplen
  push32(fix32(options_.link_type));
}

std::uint32_t PcapBuilder::fix32(std::uint32_t v) const {
  if (!options_.byte_swapped) return v;
  return ((v & 0xFF) << 24) | ((v & 0xFF00) << 8) | ((v >> 8) & 0xFF00) | (v >> 24);
}

void PcapBuilder::push32(std::uint32_t v) {
  std::uint8_t b[4];
  store_le32(b, v);
  out_.insert(out_.end(), b, b + 4);
}

void PcapBuilder::add_record(ByteSpan frame, Timestamp ts) {
  push32(fix32(static_cast<std::uint32_t>(ts.sec)));
  push32(fix32(options_.nanosecond ? ts.nsec : ts.nsec / 1000));
  push32(fix32(static_cast<std::uint32_t>(frame.size())));
  push32(fix32(static_cast<std::uint32_t>(frame.size())));
  out_.insert(out_.end(), frame.begin(), frame.end());
}

void PcapBuilder::add_udp(std::uint16_t dst_port, ByteSpan payload, Timestamp ts) {
  add_record(udp_frame(dst_port, payload), ts);
}

void PcapBuilder::add_arp(Timestamp ts) {
  Bytes frame(14 + 28, 0);
  store_be16(&frame[12], 0x0806);  // ARP ethertype
  add_record(frame, ts);
}

void PcapBuilder::add_fragmented_udp(std::uint16_t dst_port, ByteSpan payload, Timestamp ts) {
  add_record(udp_frame(dst_port, payload, true), ts);
}

}  // namespace lmc::testutil
