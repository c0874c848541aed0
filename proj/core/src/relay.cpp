// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lmc/relay.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cstring>
#include <mutex>
#include <thread>

#include "frame_pool.hpp"
#include "lmc/container.hpp"
#include "lmc/error.hpp"
#include "lmc/mask.hpp"

namespace lmc {

using Clock = std::chrono::steady_clock;

namespace {

sockaddr_storage resolve(const Endpoint& ep, socklen_t& len) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_DGRAM;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(ep.port);
  const int rc = getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &res);
  if (rc != 0 || res == nullptr) {
    throw Error("cannot resolve " + ep.host + ":" + port + " (" + gai_strerror(rc) + ")");
  }
  sockaddr_storage out{};
  std::memcpy(&out, res->ai_addr, res->ai_addrlen);
  len = static_cast<socklen_t>(res->ai_addrlen);
  freeaddrinfo(res);
  return out;
}

}  // namespace

UdpChannel::UdpChannel(const Endpoint& local, std::optional<Endpoint> peer) {
  fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd_ < 0) throw Error("cannot create UDP socket");

  socklen_t local_len = 0;
  sockaddr_storage local_addr = resolve(local, local_len);
  int reuse = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &reuse, sizeof(reuse));
  // Generous buffers: sensor bursts must survive codec hiccups.
  int bufsize = 4 * 1024 * 1024;
  ::setsockopt(fd_, SOL_SOCKET, SO_RCVBUF, &bufsize, sizeof(bufsize));
  ::setsockopt(fd_, SOL_SOCKET, SO_SNDBUF, &bufsize, sizeof(bufsize));
  if (::bind(fd_, reinterpret_cast<const sockaddr*>(&local_addr), local_len) != 0) {
    ::close(fd_);
    throw Error("cannot bind UDP socket to " + local.host + ":" + std::to_string(local.port) +
                " (" + std::strerror(errno) + ")");
  }
  sockaddr_storage bound{};
  socklen_t bound_len = sizeof(bound);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &bound_len);
  local_port_ = ntohs(reinterpret_cast<const sockaddr_in*>(&bound)->sin_port);

  if (peer) {
    socklen_t peer_len = 0;
    sockaddr_storage peer_addr = resolve(*peer, peer_len);
    static_assert(sizeof(addr_storage_) >= sizeof(sockaddr_storage));
    std::memcpy(addr_storage_, &peer_addr, sizeof(peer_addr));
    addr_len_ = peer_len;
    has_peer_ = true;
  }
}

UdpChannel::~UdpChannel() {
  if (fd_ >= 0) ::close(fd_);
}

void UdpChannel::send(ByteSpan datagram) {
  if (!has_peer_ && !has_reply_addr_) {
    throw Error("UDP channel has no destination yet");
  }
  const auto sent = ::sendto(fd_, datagram.data(), datagram.size(), 0,
                             reinterpret_cast<const sockaddr*>(addr_storage_), addr_len_);
  if (sent < 0) {
    if (errno == ECONNREFUSED) return;  // peer not up yet; datagrams are fire-and-forget
    throw Error(std::string("UDP send failed: ") + std::strerror(errno));
  }
}

std::optional<Bytes> UdpChannel::receive(std::chrono::milliseconds timeout) {
  pollfd pfd{fd_, POLLIN, 0};
  const int rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
  if (rc < 0) {
    if (errno == EINTR) return std::nullopt;
    throw Error(std::string("poll failed: ") + std::strerror(errno));
  }
  if (rc == 0) return std::nullopt;

  Bytes buf(65536);
  sockaddr_storage from{};
  socklen_t from_len = sizeof(from);
  const auto got = ::recvfrom(fd_, buf.data(), buf.size(), 0,
                              reinterpret_cast<sockaddr*>(&from), &from_len);
  if (got < 0) {
    if (errno == ECONNREFUSED || errno == EAGAIN) return std::nullopt;
    throw Error(std::string("UDP receive failed: ") + std::strerror(errno));
  }
  if (!has_peer_) {
    std::memcpy(addr_storage_, &from, sizeof(from));
    addr_len_ = from_len;
    has_reply_addr_ = true;
  }
  buf.resize(static_cast<std::size_t>(got));
  return buf;
}

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Emitter-side state shared with the ingest loop.
struct SenderShared {
  std::atomic<std::uint32_t> effective_frame_size{1};
  std::atomic<std::uint64_t> frames_sent{0};
  std::atomic<std::uint64_t> packets_out{0};
  std::atomic<std::uint64_t> bytes_out{0};
  std::atomic<std::uint64_t> frames_split{0};
  std::atomic<std::uint64_t> split_codec_ns{0};
  std::atomic<bool> failed{false};
};

Bytes frame_datagram(std::uint32_t packet_count, ByteSpan payload) {
  Bytes d;
  d.reserve(1 + FrameHeader::kEncodedSize + payload.size());
  d.push_back(kFrameDatagram);
  const FrameHeader fh{packet_count, static_cast<std::uint32_t>(payload.size()), crc32(payload)};
  const auto hdr = fh.encode();
  d.insert(d.end(), hdr.begin(), hdr.end());
  d.insert(d.end(), payload.begin(), payload.end());
  return d;
}

/// Sends one compressed frame, re-cutting it into smaller frames when the
/// datagram would exceed the budget (and shrinking future frames to match).
void emit_frame(DatagramChannel& egress, const PipelineConfig& config,
                const CodecSettings& codec, std::size_t packet_size, SenderShared& shared,
                std::uint32_t packet_count, ByteSpan raw, ByteSpan compressed) {
  const std::size_t datagram_size = 1 + FrameHeader::kEncodedSize + compressed.size();
  if (datagram_size > config.datagram_budget && packet_count > 1) {
    const std::uint32_t half = packet_count / 2;
    shared.frames_split.fetch_add(1, std::memory_order_relaxed);
    // Future frames should fit without re-cutting.
    std::uint32_t current = shared.effective_frame_size.load(std::memory_order_relaxed);
    while (half < current &&
           !shared.effective_frame_size.compare_exchange_weak(current, half)) {
    }
    const auto t0 = Clock::now();
    const ByteSpan first = raw.subspan(0, std::size_t{half} * packet_size);
    const ByteSpan second = raw.subspan(std::size_t{half} * packet_size);
    const Bytes c1 = compress(first, codec);
    const Bytes c2 = compress(second, codec);
    shared.split_codec_ns.fetch_add(
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count(),
        std::memory_order_relaxed);
    emit_frame(egress, config, codec, packet_size, shared, half, first, c1);
    emit_frame(egress, config, codec, packet_size, shared, packet_count - half, second, c2);
    return;
  }
  const Bytes datagram = frame_datagram(packet_count, compressed);
  egress.send(datagram);
  shared.frames_sent.fetch_add(1, std::memory_order_relaxed);
  shared.packets_out.fetch_add(packet_count, std::memory_order_relaxed);
  shared.bytes_out.fetch_add(datagram.size(), std::memory_order_relaxed);
}

}  // namespace

RelayStats run_relay_sender(DatagramChannel& ingress, DatagramChannel& egress,
                            const PacketLayout& layout, const PipelineConfig& config,
                            std::stop_token stop) {
  config.validate(layout);
  const auto wall_start = Clock::now();

  const PacketMask mask(layout, config.masked_bits);
  const StreamHeader header = make_stream_header(layout, config.masked_bits, config.codec.codec);
  Bytes header_datagram;
  header_datagram.push_back(kHeaderDatagram);
  const auto header_bytes = header.encode();
  header_datagram.insert(header_datagram.end(), header_bytes.begin(), header_bytes.end());

  egress.send(header_datagram);

  RelayStats stats;
  SenderShared shared;
  shared.effective_frame_size.store(config.frame_size);
  std::atomic<std::uint64_t> header_requests{0};
  detail::FramePool pool(config.worker_count, config.queue_capacity, config.codec,
                         config.overflow);

  // Serves header re-send requests arriving on the egress socket.
  std::jthread request_thread([&](std::stop_token rst) {
    while (!rst.stop_requested()) {
      try {
        auto d = egress.receive(std::chrono::milliseconds(100));
        if (d && !d->empty() && (*d)[0] == kHeaderRequest) {
          egress.send(header_datagram);
          header_requests.fetch_add(1, std::memory_order_relaxed);
        }
      } catch (const Error&) {
        return;
      }
    }
  });

  // Pulls compressed frames in order and sends one datagram per frame.
  std::jthread emitter([&] {
    const std::size_t packet_size = layout.packet_size();
    try {
      while (auto result = pool.next_result()) {
        if (result->dropped) continue;  // accounted by the pool
        if (result->error) std::rethrow_exception(result->error);
        emit_frame(egress, config, config.codec, packet_size, shared, result->packet_count,
                   result->raw, result->compressed);
      }
    } catch (const std::exception&) {
      shared.failed.store(true);
    }
  });

  const std::size_t packet_size = layout.packet_size();
  const auto poll_interval = std::min<std::chrono::milliseconds>(config.flush_interval,
                                                                 std::chrono::milliseconds(50));
  Bytes frame;
  std::uint32_t frame_packets = 0;
  Clock::time_point frame_started{};
  double mask_time = 0.0;

  auto flush = [&] {
    if (frame_packets == 0) return;
    const auto t0 = Clock::now();
    apply_mask_batch(frame, mask);
    mask_time += seconds_since(t0);
    pool.submit(std::move(frame), frame_packets);
    frame = Bytes();
    frame_packets = 0;
  };

  try {
    while (!stop.stop_requested() && !shared.failed.load()) {
      auto datagram = ingress.receive(poll_interval);
      if (datagram) {
        if (datagram->size() != packet_size) {
          ++stats.datagrams_skipped;  // oversized or undersized sensor datagram
        } else {
          if (frame_packets == 0) frame_started = Clock::now();
          ++stats.packets_in;
          stats.bytes_in += datagram->size();
          frame.insert(frame.end(), datagram->begin(), datagram->end());
          ++frame_packets;
        }
      }
      if (frame_packets >= shared.effective_frame_size.load(std::memory_order_relaxed)) {
        flush();
      } else if (frame_packets > 0 && Clock::now() - frame_started >= config.flush_interval) {
        flush();
      }
    }
  } catch (const Error&) {
    // Socket error: stop and report what was counted so far.
  }
  flush();
  pool.close();
  emitter.join();
  request_thread.request_stop();
  request_thread.join();

  stats.frames_sent = shared.frames_sent.load();
  stats.packets_out = shared.packets_out.load();
  stats.bytes_out = shared.bytes_out.load();
  stats.frames_split = shared.frames_split.load();
  stats.frames_dropped = pool.frames_dropped();
  stats.packets_dropped = pool.packets_dropped();
  stats.header_requests = header_requests.load();
  stats.masking_time_s = mask_time;
  stats.codec_time_s = pool.codec_time_s() + shared.split_codec_ns.load() * 1e-9;
  stats.wall_time_s = seconds_since(wall_start);
  return stats;
}

RelayStats run_relay_receiver(DatagramChannel& channel, PacketSink& out, std::stop_token stop) {
  const auto wall_start = Clock::now();
  RelayStats stats;
  std::optional<StreamHeader> header;
  std::optional<CodecSettings> settings;
  Clock::time_point last_request{};

  while (!stop.stop_requested()) {
    std::optional<Bytes> datagram;
    try {
      datagram = channel.receive(std::chrono::milliseconds(100));
    } catch (const Error&) {
      break;
    }
    if (!datagram || datagram->empty()) continue;
    stats.bytes_in += datagram->size();
    const std::uint8_t type = (*datagram)[0];
    const ByteSpan body(datagram->data() + 1, datagram->size() - 1);

    if (type == kHeaderDatagram) {
      try {
        header = StreamHeader::decode(body);
        settings = CodecSettings{header->codec};
      } catch (const Error&) {
        ++stats.frames_dropped;
      }
      continue;
    }
    if (type != kFrameDatagram) continue;

    if (!header) {
      ++stats.frames_before_header;
      // Ask the sender for the header, at most a few times per second.
      if (Clock::now() - last_request > std::chrono::milliseconds(200)) {
        last_request = Clock::now();
        try {
          channel.send(Bytes{kHeaderRequest});
        } catch (const Error&) {
        }
      }
      continue;
    }

    if (body.size() < FrameHeader::kEncodedSize) {
      ++stats.frames_dropped;
      continue;
    }
    const FrameHeader fh = FrameHeader::decode(body.subspan(0, FrameHeader::kEncodedSize));
    const ByteSpan payload = body.subspan(FrameHeader::kEncodedSize);
    if (fh.is_terminal()) continue;
    if (payload.size() != fh.compressed_len || crc32(payload) != fh.checksum) {
      ++stats.frames_dropped;
      continue;
    }
    Bytes packets;
    try {
      packets = decompress(payload, *settings,
                           std::size_t{fh.packet_count} * header->packet_size);
    } catch (const Error&) {
      ++stats.frames_dropped;
      continue;
    }
    if (packets.size() != std::size_t{fh.packet_count} * header->packet_size) {
      ++stats.frames_dropped;
      continue;
    }

    ++stats.frames_received;
    stats.packets_in += fh.packet_count;
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    const std::uint64_t now_ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(now).count();
    for (std::size_t pos = 0; pos < packets.size(); pos += header->packet_size) {
      TimedPacket packet;
      packet.ts = {now_ns / 1'000'000'000, static_cast<std::uint32_t>(now_ns % 1'000'000'000)};
      packet.payload.assign(packets.begin() + static_cast<std::ptrdiff_t>(pos),
                            packets.begin() + static_cast<std::ptrdiff_t>(pos + header->packet_size));
      out.write(packet);
      ++stats.packets_out;
      stats.bytes_out += header->packet_size;
    }
  }
  stats.wall_time_s = seconds_since(wall_start);
  return stats;
}

RelayStats run_relay_sender(const Endpoint& listen, const Endpoint& dest,
                            const PacketLayout& layout, const PipelineConfig& config,
                            std::stop_token stop) {
  UdpChannel ingress(listen, std::nullopt);
  UdpChannel egress(Endpoint{"0.0.0.0", 0}, dest);
  return run_relay_sender(ingress, egress, layout, config, stop);
}

RelayStats run_relay_receiver(const Endpoint& listen, PacketSink& out, std::stop_token stop) {
  UdpChannel channel(listen, std::nullopt);
  return run_relay_receiver(channel, out, stop);
}

}  // namespace lmc
