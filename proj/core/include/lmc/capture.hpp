// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>

#include "lmc/bytes.hpp"

namespace lmc {

/// Nominal inter-packet interval of the reference sensor (one packet
/// every 1.33 ms), used to synthesize timestamps for headerless files.
inline constexpr std::chrono::nanoseconds kNominalPacketInterval{1'330'000};

/// Capture timestamp with nanosecond resolution (pcap nanosecond files
/// keep full precision; microsecond files use whole microseconds).
struct Timestamp {
  std::uint64_t sec = 0;
  std::uint32_t nsec = 0;

  double to_seconds() const { return static_cast<double>(sec) + nsec * 1e-9; }
  auto operator<=>(const Timestamp&) const = default;
};

struct TimedPacket {
  Timestamp ts;
  Bytes payload;
};

/// Pull interface over a stream of sensor packets. One consumer per
/// instance; independent instances are fully independent.
class PacketSource {
 public:
  virtual ~PacketSource() = default;

  /// Next packet in capture order, or nullopt at end of stream.
  virtual std::optional<TimedPacket> next() = 0;

  /// Sensor-time duration covered by the packets read so far. For pcap
  /// this is first-to-last capture timestamp; for headerless input it is
  /// packet count times the nominal interval.
  virtual double dataset_duration_s() const = 0;
};

struct PcapFilter {
  std::uint16_t udp_dst_port = 2368;
  std::uint32_t payload_size = 1206;
};

/// Records seen but not yielded, by reason.
struct PcapSkipStats {
  std::uint64_t records = 0;      // total records in the capture
  std::uint64_t matched = 0;      // yielded packets
  std::uint64_t non_udp = 0;      // non-IPv4/UDP (ARP, IPv6, VLAN, ...)
  std::uint64_t fragmented = 0;   // fragmented IPv4, never reassembled
  std::uint64_t wrong_port = 0;
  std::uint64_t wrong_size = 0;   // right port, payload size mismatch
};

/// Streaming classic-pcap reader. Handles both byte orders and the
/// microsecond/nanosecond magic variants; yields UDP payloads matching
/// the filter. Memory use is bounded by the largest record, not the file.
class PcapReader : public PacketSource {
 public:
  /// Reads the global header. Throws FormatError on bad magic or a
  /// non-Ethernet link type.
  PcapReader(std::istream& in, PcapFilter filter = {});

  /// Throws TruncationError when the file ends inside a record (all
  /// complete records are yielded first).
  std::optional<TimedPacket> next() override;

  double dataset_duration_s() const override;

  const PcapSkipStats& stats() const { return stats_; }
  bool nanosecond_timestamps() const { return nanosecond_; }
  bool byte_swapped() const { return swapped_; }

 private:
  std::istream& in_;
  PcapFilter filter_;
  PcapSkipStats stats_;
  Bytes record_buf_;
  bool swapped_ = false;
  bool nanosecond_ = false;
  std::optional<Timestamp> first_ts_;
  Timestamp last_ts_;
};

/// Fixed-size slicing of a headerless concatenated-packet file, with
/// synthetic timestamps at the nominal packet interval.
class RawReader : public PacketSource {
 public:
  RawReader(std::istream& in, std::uint32_t packet_size);

  std::optional<TimedPacket> next() override;
  double dataset_duration_s() const override;

  /// True once a trailing partial packet was discarded.
  bool truncated_tail() const { return truncated_tail_; }
  std::uint64_t packets_read() const { return packets_; }

 private:
  std::istream& in_;
  std::uint32_t packet_size_;
  std::uint64_t packets_ = 0;
  bool truncated_tail_ = false;
  bool eof_ = false;
};

/// In-memory source over a contiguous buffer of whole packets, with
/// synthetic timestamps (used by sweeps and tests).
class MemorySource : public PacketSource {
 public:
  /// Throws StructuralError if the buffer is not a multiple of packet_size.
  MemorySource(ByteSpan packets, std::uint32_t packet_size);

  std::optional<TimedPacket> next() override;
  double dataset_duration_s() const override;

 private:
  ByteSpan data_;
  std::uint32_t packet_size_;
  std::uint64_t index_ = 0;
};

/// Push interface for emitting packets.
class PacketSink {
 public:
  virtual ~PacketSink() = default;
  virtual void write(const TimedPacket& packet) = 0;
};

/// Classic pcap writer (little-endian, microsecond timestamps, Ethernet
/// link type). Ethernet/IPv4/UDP headers are synthesized with fixed
/// placeholder addresses; payload and timestamp fidelity is the contract.
class PcapWriter : public PacketSink {
 public:
  PcapWriter(std::ostream& out, std::uint16_t udp_port = 2368);
  void write(const TimedPacket& packet) override;

 private:
  std::ostream& out_;
  std::uint16_t port_;
  bool header_written_ = false;
};

/// Headerless concatenated-packet writer.
class RawWriter : public PacketSink {
 public:
  explicit RawWriter(std::ostream& out) : out_(out) {}
  void write(const TimedPacket& packet) override;

 private:
  std::ostream& out_;
};

enum class CaptureFormat { kPcap, kLmcContainer, kRaw };

/// Sniffs the first four bytes: pcap magics, then "LMC1", else raw.
/// The stream position is restored.
CaptureFormat detect_format(std::istream& in);

/// Opens a packet source of the given (or detected) format.
std::unique_ptr<PacketSource> open_packet_source(std::istream& in, CaptureFormat format,
                                                 std::uint32_t packet_size,
                                                 PcapFilter filter = {});

}  // namespace lmc
