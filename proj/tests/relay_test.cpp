// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lmc/relay.hpp"

#include <gtest/gtest.h>

#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <random>
#include <thread>

#include "lmc/container.hpp"
#include "lmc/error.hpp"
#include "lmc/mask.hpp"
#include "synth.hpp"

namespace lmc {
namespace {

/// In-process datagram link for deterministic relay tests: two channels
/// wired back to back, with optional per-datagram hooks on each
/// direction (drop, delay, inspection).
class InProcLink {
 public:
  struct Inbox {
    std::mutex m;
    std::condition_variable cv;
    std::deque<Bytes> q;
  };

  class Channel : public DatagramChannel {
   public:
    Channel(Inbox& rx, Inbox& tx) : rx_(rx), tx_(tx) {}

    std::function<bool(ByteSpan)> send_hook;  // return false to drop

    void send(ByteSpan datagram) override {
      if (send_hook && !send_hook(datagram)) return;
      std::lock_guard lock(tx_.m);
      tx_.q.emplace_back(datagram.begin(), datagram.end());
      tx_.cv.notify_one();
    }

    std::optional<Bytes> receive(std::chrono::milliseconds timeout) override {
      std::unique_lock lock(rx_.m);
      if (!rx_.cv.wait_for(lock, timeout, [this] { return !rx_.q.empty(); })) {
        return std::nullopt;
      }
      Bytes out = std::move(rx_.q.front());
      rx_.q.pop_front();
      return out;
    }

   private:
    Inbox& rx_;
    Inbox& tx_;
  };

  InProcLink() : a_(boxes_[0], boxes_[1]), b_(boxes_[1], boxes_[0]) {}

  Channel& a() { return a_; }  // sends into b's inbox
  Channel& b() { return b_; }

 private:
  Inbox boxes_[2];
  Channel a_;
  Channel b_;
};

class VectorSink : public PacketSink {
 public:
  void write(const TimedPacket& packet) override {
    data.insert(data.end(), packet.payload.begin(), packet.payload.end());
  }
  Bytes data;
};

Bytes masked_copy(ByteSpan stream, unsigned n) {
  Bytes out(stream.begin(), stream.end());
  apply_mask_batch(out, PacketMask(reference_layout(), n));
  return out;
}

PipelineConfig relay_config(unsigned n, CodecId codec, std::uint32_t frame_size) {
  PipelineConfig config;
  config.masked_bits = n;
  config.codec = {codec};
  config.frame_size = frame_size;
  config.flush_interval = std::chrono::milliseconds(50);
  return config;
}

/// Runs sender and receiver over the given channels while `feed` pushes
/// sensor datagrams, then winds everything down in order.
struct RelayRun {
  RelayStats sender;
  RelayStats receiver;
  Bytes received;
};

RelayRun run_relay(DatagramChannel& ingress_side, DatagramChannel& sender_egress,
                   DatagramChannel& receiver_channel, const PipelineConfig& config,
                   const std::function<void()>& feed,
                   std::chrono::milliseconds settle = std::chrono::milliseconds(400)) {
  RelayRun out;
  VectorSink sink;
  std::stop_source sender_stop;
  std::stop_source receiver_stop;

  std::thread receiver([&] {
    out.receiver = run_relay_receiver(receiver_channel, sink, receiver_stop.get_token());
  });
  std::thread sender([&] {
    out.sender = run_relay_sender(ingress_side, sender_egress, reference_layout(), config,
                                  sender_stop.get_token());
  });

  feed();
  std::this_thread::sleep_for(settle);
  sender_stop.request_stop();
  sender.join();
  std::this_thread::sleep_for(std::chrono::milliseconds(200));
  receiver_stop.request_stop();
  receiver.join();
  out.received = std::move(sink.data);
  return out;
}

TEST(RelayInProc, LosslessLinkDeliversMaskedStream) {
  InProcLink sensor_link;   // test -> sender ingress
  InProcLink wire;          // sender egress <-> receiver
  const Bytes stream = testutil::structured_stream(reference_layout(), 100, 1);

  const auto run =
      run_relay(sensor_link.b(), wire.a(), wire.b(), relay_config(4, CodecId::kLz4, 10), [&] {
        for (std::size_t pos = 0; pos < stream.size(); pos += 1206) {
          sensor_link.a().send(ByteSpan(stream.data() + pos, 1206));
        }
      });

  EXPECT_EQ(run.sender.packets_in, 100u);
  EXPECT_EQ(run.sender.packets_out, 100u);
  EXPECT_EQ(run.sender.frames_dropped, 0u);
  EXPECT_EQ(run.sender.packets_dropped, 0u);
  EXPECT_EQ(run.receiver.packets_out, 100u);
  EXPECT_EQ(run.received, masked_copy(stream, 4));
  EXPECT_GT(run.sender.bytes_out, 0u);
  EXPECT_LT(run.sender.bytes_out, run.sender.bytes_in);  // lz4 on maskable data
}

TEST(RelayInProc, TenPercentFrameLossLedgerBalances) {
  InProcLink sensor_link;
  InProcLink wire;
  std::mt19937 rng(2);
  const Bytes stream = testutil::random_stream(reference_layout(), 100, rng);

  // Drop every 10th frame datagram; headers pass.
  std::uint64_t frame_no = 0;
  std::uint64_t dropped_packets = 0;
  std::mutex drop_mutex;
  wire.a().send_hook = [&](ByteSpan d) {
    if (d.empty() || d[0] != kFrameDatagram) return true;
    std::lock_guard lock(drop_mutex);
    if (frame_no++ % 10 == 9) {
      const FrameHeader fh = FrameHeader::decode(d.subspan(1, FrameHeader::kEncodedSize));
      dropped_packets += fh.packet_count;
      return false;
    }
    return true;
  };

  const auto run =
      run_relay(sensor_link.b(), wire.a(), wire.b(), relay_config(2, CodecId::kDeflate, 10), [&] {
        for (std::size_t pos = 0; pos < stream.size(); pos += 1206) {
          sensor_link.a().send(ByteSpan(stream.data() + pos, 1206));
        }
      });

  // Sender saw and sent everything; the link ate exactly one frame in ten.
  EXPECT_EQ(run.sender.packets_in, 100u);
  EXPECT_EQ(run.sender.packets_out, 100u);
  EXPECT_EQ(dropped_packets, 10u);
  EXPECT_EQ(run.receiver.packets_out + dropped_packets, run.sender.packets_out);
  EXPECT_EQ(run.receiver.frames_received, 9u);
  EXPECT_EQ(run.receiver.frames_dropped, 0u);  // lost, not corrupt
}

TEST(RelayInProc, DropOldestBoundsQueueAndCountsExactly) {
  InProcLink sensor_link;
  InProcLink wire;
  std::mt19937 rng(3);
  const Bytes stream = testutil::random_stream(reference_layout(), 200, rng);

  // Stall the wire so compressed frames pile up in the bounded queue.
  wire.a().send_hook = [&](ByteSpan d) {
    if (!d.empty() && d[0] == kFrameDatagram) {
      std::this_thread::sleep_for(std::chrono::milliseconds(40));
    }
    return true;
  };

  PipelineConfig config = relay_config(0, CodecId::kStore, 10);
  config.overflow = OverflowPolicy::kDropOldest;
  config.queue_capacity = 2;
  config.datagram_budget = 64 * 1024;

  const auto run = run_relay(sensor_link.b(), wire.a(), wire.b(), config, [&] {
    for (std::size_t pos = 0; pos < stream.size(); pos += 1206) {
      sensor_link.a().send(ByteSpan(stream.data() + pos, 1206));
    }
  }, std::chrono::milliseconds(1200));

  EXPECT_EQ(run.sender.packets_in, 200u);
  EXPECT_GT(run.sender.frames_dropped, 0u);
  // Exact conservation: every ingested packet was either sent or dropped.
  EXPECT_EQ(run.sender.packets_in, run.sender.packets_out + run.sender.packets_dropped);
  EXPECT_EQ(run.received.size(), run.receiver.packets_out * 1206);
}

TEST(RelayInProc, FrameBeforeHeaderTriggersRequestAndResend) {
  InProcLink wire;
  VectorSink sink;
  std::stop_source stop;
  RelayStats stats;
  std::thread receiver([&] { stats = run_relay_receiver(wire.b(), sink, stop.get_token()); });

  // Hand-craft a one-packet frame datagram and send it before any header.
  const Bytes packet = masked_copy(testutil::blank_packet(reference_layout()), 4);
  const Bytes payload = compress(packet, {CodecId::kLz4});
  Bytes frame_dgram{kFrameDatagram};
  const FrameHeader fh{1, static_cast<std::uint32_t>(payload.size()), crc32(payload)};
  const auto fh_bytes = fh.encode();
  frame_dgram.insert(frame_dgram.end(), fh_bytes.begin(), fh_bytes.end());
  frame_dgram.insert(frame_dgram.end(), payload.begin(), payload.end());

  wire.a().send(frame_dgram);

  // The receiver must ask for the header.
  auto request = wire.a().receive(std::chrono::milliseconds(2000));
  ASSERT_TRUE(request.has_value());
  EXPECT_EQ((*request)[0], kHeaderRequest);

  // Serve the header, then the same frame decodes.
  const StreamHeader header = make_stream_header(reference_layout(), 4, CodecId::kLz4);
  Bytes header_dgram{kHeaderDatagram};
  const auto hb = header.encode();
  header_dgram.insert(header_dgram.end(), hb.begin(), hb.end());
  wire.a().send(header_dgram);
  std::this_thread::sleep_for(std::chrono::milliseconds(100));
  wire.a().send(frame_dgram);

  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  stop.request_stop();
  receiver.join();

  EXPECT_EQ(stats.frames_before_header, 1u);
  EXPECT_EQ(stats.packets_out, 1u);
  EXPECT_EQ(sink.data, packet);
}

TEST(RelayInProc, CorruptFrameDroppedAndCounted) {
  InProcLink wire;
  VectorSink sink;
  std::stop_source stop;
  RelayStats stats;
  std::thread receiver([&] { stats = run_relay_receiver(wire.b(), sink, stop.get_token()); });

  const StreamHeader header = make_stream_header(reference_layout(), 0, CodecId::kStore);
  Bytes header_dgram{kHeaderDatagram};
  const auto hb = header.encode();
  header_dgram.insert(header_dgram.end(), hb.begin(), hb.end());
  wire.a().send(header_dgram);

  const Bytes packet = testutil::blank_packet(reference_layout());
  Bytes frame_dgram{kFrameDatagram};
  const FrameHeader fh{1, 1206, crc32(packet)};
  const auto fh_bytes = fh.encode();
  frame_dgram.insert(frame_dgram.end(), fh_bytes.begin(), fh_bytes.end());
  frame_dgram.insert(frame_dgram.end(), packet.begin(), packet.end());

  Bytes corrupt = frame_dgram;
  corrupt[40] ^= 0x01;  // payload byte: checksum must catch it
  wire.a().send(corrupt);
  wire.a().send(frame_dgram);

  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  stop.request_stop();
  receiver.join();

  EXPECT_EQ(stats.frames_dropped, 1u);
  EXPECT_EQ(stats.frames_received, 1u);
  EXPECT_EQ(sink.data, packet);
}

TEST(RelayInProc, OversizedFramesSplitToFitBudget) {
  InProcLink sensor_link;
  InProcLink wire;
  std::mt19937 rng(4);
  const Bytes stream = testutil::random_stream(reference_layout(), 30, rng);

  std::size_t max_datagram = 0;
  std::mutex size_mutex;
  wire.a().send_hook = [&](ByteSpan d) {
    std::lock_guard lock(size_mutex);
    max_datagram = std::max(max_datagram, d.size());
    return true;
  };

  PipelineConfig config = relay_config(0, CodecId::kStore, 10);
  config.datagram_budget = 2000;  // forces one packet per datagram

  const auto run = run_relay(sensor_link.b(), wire.a(), wire.b(), config, [&] {
    for (std::size_t pos = 0; pos < stream.size(); pos += 1206) {
      sensor_link.a().send(ByteSpan(stream.data() + pos, 1206));
    }
  });

  EXPECT_GT(run.sender.frames_split, 0u);
  EXPECT_LE(max_datagram, 2000u);
  EXPECT_EQ(run.receiver.packets_out, 30u);
  EXPECT_EQ(run.received, stream);  // n = 0, STORE: byte-identical
}

TEST(RelayInProc, WrongSizeIngressDatagramsSkipped) {
  InProcLink sensor_link;
  InProcLink wire;
  const Bytes good = testutil::blank_packet(reference_layout());

  const auto run =
      run_relay(sensor_link.b(), wire.a(), wire.b(), relay_config(0, CodecId::kStore, 5), [&] {
        sensor_link.a().send(Bytes(100, 0));  // undersized
        sensor_link.a().send(good);
        sensor_link.a().send(Bytes(2000, 0));  // oversized
      });

  EXPECT_EQ(run.sender.packets_in, 1u);
  EXPECT_EQ(run.sender.datagrams_skipped, 2u);
  EXPECT_EQ(run.receiver.packets_out, 1u);
}

// Real sockets on the loopback interface, moderate rate.
TEST(RelayUdp, LoopbackEndToEnd) {
  UdpChannel receiver_chan({"127.0.0.1", 0}, std::nullopt);
  UdpChannel ingress({"127.0.0.1", 0}, std::nullopt);
  UdpChannel egress({"127.0.0.1", 0}, Endpoint{"127.0.0.1", receiver_chan.local_port()});
  UdpChannel feeder({"127.0.0.1", 0}, Endpoint{"127.0.0.1", ingress.local_port()});

  std::mt19937 rng(5);
  const Bytes stream = testutil::random_stream(reference_layout(), 300, rng);

  const auto run = run_relay(ingress, egress, receiver_chan,
                             relay_config(4, CodecId::kLz4, 25), [&] {
                               for (std::size_t pos = 0; pos < stream.size(); pos += 1206) {
                                 feeder.send(ByteSpan(stream.data() + pos, 1206));
                                 if ((pos / 1206) % 25 == 24) {
                                   std::this_thread::sleep_for(std::chrono::milliseconds(2));
                                 }
                               }
                             });

  EXPECT_EQ(run.sender.packets_in, 300u);
  EXPECT_EQ(run.sender.frames_dropped, 0u);
  EXPECT_EQ(run.receiver.packets_out, 300u);
  EXPECT_EQ(run.received, masked_copy(stream, 4));
}

}  // namespace
}  // namespace lmc
