// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <stop_token>
#include <string>

#include "lmc/bytes.hpp"
#include "lmc/capture.hpp"
#include "lmc/pipeline.hpp"

namespace lmc {

/// Datagram type bytes of the relay wire protocol. Each datagram is the
/// type byte followed by the exact container encoding of the payload:
///   kHeaderDatagram:  StreamHeader (21 bytes)
///   kFrameDatagram:   FrameHeader (12 bytes) + compressed payload
///   kHeaderRequest:   empty; receiver asks the sender to re-send the header
inline constexpr std::uint8_t kHeaderDatagram = 0;
inline constexpr std::uint8_t kFrameDatagram = 1;
inline constexpr std::uint8_t kHeaderRequest = 2;

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
};

/// Minimal bidirectional datagram transport, virtual so tests can inject
/// loss or stalls between relay ends.
class DatagramChannel {
 public:
  virtual ~DatagramChannel() = default;

  virtual void send(ByteSpan datagram) = 0;

  /// Next datagram, or nullopt after `timeout` with nothing received.
  virtual std::optional<Bytes> receive(std::chrono::milliseconds timeout) = 0;
};

/// UDP socket bound to `local`; send() goes to `peer` unless the channel
/// was constructed receive-only, in which case it replies to the last
/// sender. Throws Error on socket failures.
class UdpChannel : public DatagramChannel {
 public:
  UdpChannel(const Endpoint& local, std::optional<Endpoint> peer);
  ~UdpChannel() override;

  UdpChannel(const UdpChannel&) = delete;
  UdpChannel& operator=(const UdpChannel&) = delete;

  void send(ByteSpan datagram) override;
  std::optional<Bytes> receive(std::chrono::milliseconds timeout) override;

  std::uint16_t local_port() const { return local_port_; }

 private:
  int fd_ = -1;
  std::uint16_t local_port_ = 0;
  bool has_peer_ = false;       // fixed destination given at construction
  bool has_reply_addr_ = false; // otherwise: reply to the last sender seen
  std::uint32_t addr_len_ = 0;
  alignas(8) unsigned char addr_storage_[128]{};  // holds a sockaddr_storage
};

struct RelayStats {
  std::uint64_t packets_in = 0;       // datagrams of exact packet size accepted
  std::uint64_t packets_out = 0;      // sender: packets in sent frames; receiver: packets emitted
  std::uint64_t frames_sent = 0;
  std::uint64_t frames_dropped = 0;   // sender: overflow drops; receiver: checksum failures
  std::uint64_t bytes_in = 0;
  std::uint64_t bytes_out = 0;
  std::uint64_t packets_dropped = 0;  // packets inside dropped frames (exact ledger)
  std::uint64_t datagrams_skipped = 0;  // wrong-size ingress datagrams
  std::uint64_t frames_split = 0;       // frames re-cut to fit the datagram budget
  std::uint64_t frames_received = 0;          // receiver
  std::uint64_t frames_before_header = 0;     // receiver: discarded, header not yet seen
  std::uint64_t header_requests = 0;          // sender: re-sends served
  double masking_time_s = 0.0;
  double codec_time_s = 0.0;
  double wall_time_s = 0.0;
};

/// Receives raw sensor datagrams on `ingress`, masks them in batch,
/// frames every frame_size packets or flush_interval (whichever first),
/// compresses on worker threads and sends one datagram per frame on
/// `egress`, in order. Runs until `stop` is requested; stats are final
/// on return. Conservation: packets_in == packets_out + packets_dropped.
RelayStats run_relay_sender(DatagramChannel& ingress, DatagramChannel& egress,
                            const PacketLayout& layout, const PipelineConfig& config,
                            std::stop_token stop);

/// Decodes frame datagrams and writes masked packets to `out` in arrival
/// order. Frames arriving before the stream header are discarded and
/// counted, and a header request is sent. Checksum-failed frames are
/// dropped and counted. Lost frames only cost their own packets.
RelayStats run_relay_receiver(DatagramChannel& channel, PacketSink& out, std::stop_token stop);

/// Socket-binding convenience wrappers used by the CLI.
RelayStats run_relay_sender(const Endpoint& listen, const Endpoint& dest,
                            const PacketLayout& layout, const PipelineConfig& config,
                            std::stop_token stop);
RelayStats run_relay_receiver(const Endpoint& listen, PacketSink& out, std::stop_token stop);

}  // namespace lmc
