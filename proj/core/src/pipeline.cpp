// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lmc/pipeline.hpp"

#include <chrono>
#include <istream>
#include <ostream>

#include "frame_pool.hpp"
#include "lmc/container.hpp"
#include "lmc/error.hpp"
#include "lmc/mask.hpp"

namespace lmc {

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

void PipelineConfig::validate(const PacketLayout& layout) const {
  if (masked_bits > layout.max_masked_bits()) {
    throw ParameterError("masked_bits " + std::to_string(masked_bits) + " exceeds layout bound " +
                         std::to_string(layout.max_masked_bits()));
  }
  if (!codec_available(codec.codec)) {
    throw CapabilityError(std::string(codec_name(codec.codec)) +
                          " codec is not available in this build");
  }
  if (frame_size == 0) throw ParameterError("frame_size must be at least 1");
  if (worker_count == 0) throw ParameterError("worker_count must be at least 1");
  if (queue_capacity == 0) throw ParameterError("queue_capacity must be at least 1");
}

CompressionReport compress_capture(PacketSource& in, std::ostream& out,
                                   const PacketLayout& layout, const PipelineConfig& config) {
  config.validate(layout);

  const auto wall_start = Clock::now();
  const PacketMask mask(layout, config.masked_bits);
  const StreamHeader header = make_stream_header(layout, config.masked_bits, config.codec.codec);
  StreamWriter writer(out, header, config.codec);
  // Batch compression never drops: the queue applies backpressure.
  detail::FramePool pool(config.worker_count, config.queue_capacity, config.codec,
                         OverflowPolicy::kBlock);

  CompressionReport report;
  report.codec = config.codec.codec;
  report.masked_bits = config.masked_bits;

  const std::size_t packet_size = layout.packet_size();
  const std::size_t frame_bytes = packet_size * config.frame_size;
  Bytes frame;
  frame.reserve(frame_bytes);
  std::uint32_t frame_packets = 0;
  double mask_time = 0.0;

  auto flush_frame = [&] {
    if (frame_packets == 0) return;
    const auto t0 = Clock::now();
    apply_mask_batch(frame, mask);
    mask_time += seconds_since(t0);
    pool.submit(std::move(frame), frame_packets);
    frame = Bytes();
    frame.reserve(frame_bytes);
    frame_packets = 0;
  };
  auto drain = [&](bool blocking) {
    while (auto result = blocking ? pool.next_result() : pool.try_next_result()) {
      if (result->error) std::rethrow_exception(result->error);
      writer.write_compressed_frame(result->packet_count, result->compressed);
    }
  };

  while (auto packet = in.next()) {
    if (packet->payload.size() != packet_size) {
      throw StructuralError("input packet size " + std::to_string(packet->payload.size()) +
                            " does not match layout " + std::to_string(packet_size));
    }
    report.packets += 1;
    report.original_bytes += packet->payload.size();
    frame.insert(frame.end(), packet->payload.begin(), packet->payload.end());
    if (++frame_packets == config.frame_size) {
      flush_frame();
      drain(false);
    }
  }
  flush_frame();
  pool.close();
  drain(true);
  writer.finish();

  report.compressed_bytes = writer.bytes_written();
  report.mask_time_s = mask_time;
  report.codec_time_s = pool.codec_time_s();
  report.processing_time_s = seconds_since(wall_start);
  report.dataset_duration_s = in.dataset_duration_s();
  if (report.dataset_duration_s <= 0.0) {
    // Empty or single-packet captures still get a defined report.
    report.dataset_duration_s =
        std::max(1e-9, static_cast<double>(report.packets) *
                           std::chrono::duration<double>(kNominalPacketInterval).count());
  }
  return finalize_report(report);
}

DecompressResult decompress_capture(std::istream& container, PacketSink& out) {
  const auto wall_start = Clock::now();
  StreamReader reader(container);
  DecompressResult result;
  result.report.codec = reader.header().codec;
  result.report.masked_bits = reader.header().masked_bits;

  const std::size_t packet_size = reader.header().packet_size;
  result.report.compressed_bytes = StreamHeader::kEncodedSize;
  std::uint64_t next_ns = 0;
  bool more = true;
  while (more) {
    try {
      auto frame = reader.next_frame();
      if (!frame) {
        if (reader.reached_terminal()) {
          result.report.compressed_bytes += FrameHeader::kEncodedSize;
        }
        break;
      }
      result.report.compressed_bytes += FrameHeader::kEncodedSize + frame->compressed_len;
      for (std::size_t pos = 0; pos < frame->packets.size(); pos += packet_size) {
        TimedPacket packet;
        packet.ts = {next_ns / 1'000'000'000, static_cast<std::uint32_t>(next_ns % 1'000'000'000)};
        next_ns += static_cast<std::uint64_t>(kNominalPacketInterval.count());
        packet.payload.assign(frame->packets.begin() + static_cast<std::ptrdiff_t>(pos),
                              frame->packets.begin() + static_cast<std::ptrdiff_t>(pos + packet_size));
        out.write(packet);
        ++result.packets_recovered;
        result.report.original_bytes += packet_size;
      }
    } catch (const IntegrityError& e) {
      result.lost_frames.push_back(e.frame_index().value_or(reader.next_frame_index() - 1));
      more = reader.recover();
    } catch (const TruncationError&) {
      // A cut-short payload can also be a corrupt length field; if the
      // rest of the chain still parses, treat it as a lost frame.
      const std::uint64_t failed = reader.next_frame_index() - 1;
      if (reader.recover()) {
        result.lost_frames.push_back(failed);
      } else {
        result.truncated = true;
        more = false;
      }
    }
  }

  result.report.packets = result.packets_recovered;
  result.report.processing_time_s = seconds_since(wall_start);
  result.report.dataset_duration_s =
      std::max(1e-9, static_cast<double>(result.packets_recovered) *
                         std::chrono::duration<double>(kNominalPacketInterval).count());
  result.report = finalize_report(result.report);
  return result;
}

}  // namespace lmc
