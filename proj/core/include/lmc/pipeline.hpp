// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "lmc/capture.hpp"
#include "lmc/codec.hpp"
#include "lmc/metrics.hpp"
#include "lmc/packet_model.hpp"

namespace lmc {

enum class OverflowPolicy {
  kBlock,       // producer waits for queue space; nothing is ever dropped
  kDropOldest,  // oldest queued frame is dropped and counted
};

struct PipelineConfig {
  unsigned masked_bits = 0;
  CodecSettings codec{};
  std::uint32_t frame_size = 100;  // packets per frame (~133 ms of sensor time)
  unsigned worker_count = 1;
  std::size_t queue_capacity = 8;  // frames
  OverflowPolicy overflow = OverflowPolicy::kBlock;
  std::chrono::milliseconds flush_interval{100};  // relay: max frame age before send
  std::size_t datagram_budget = 60 * 1024;        // relay: frames above this split

  /// Throws ParameterError on out-of-domain values (n above the layout
  /// bound, zero workers/capacity/frame_size).
  void validate(const PacketLayout& layout) const;
};

/// Masks and compresses a packet stream into a container. Frames are
/// compressed on worker_count threads and written strictly in order.
/// The report splits processing time into mask time and codec time.
CompressionReport compress_capture(PacketSource& in, std::ostream& out,
                                   const PacketLayout& layout, const PipelineConfig& config);

struct DecompressResult {
  CompressionReport report;                // sizes: container in, packets out
  std::vector<std::uint64_t> lost_frames;  // indices of unrecoverable frames
  bool truncated = false;                  // stream ended without terminal frame
  std::uint64_t packets_recovered = 0;

  bool clean() const { return lost_frames.empty() && !truncated; }
};

/// Decodes a container back into packets. Corrupt frames are skipped and
/// reported (frames are independent, so later frames still decode);
/// truncation is reported after all complete frames were emitted.
DecompressResult decompress_capture(std::istream& container, PacketSink& out);

}  // namespace lmc
