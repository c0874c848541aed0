// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "lmc/bytes.hpp"
#include "lmc/codec.hpp"
#include "lmc/pipeline.hpp"

namespace lmc::detail {

/// Compresses frames on N worker threads and hands results back to a
/// single consumer in submission order.
///
/// Backpressure: with kBlock, submit() waits for space in the pending
/// queue (bounded by queue_capacity); workers drain that queue without
/// the consumer's help, so a submit-then-drain loop on one thread cannot
/// deadlock, and nothing is ever dropped. With kDropOldest, the frames
/// holding payload bytes anywhere in the pool (queued, in a worker, or
/// finished but undelivered) are bounded by queue_capacity: the oldest
/// undelivered frame is evicted instead of waiting, so submit() never
/// blocks on a stalled consumer. Dropped frames still surface as marker
/// results, keeping the delivery sequence gap-free.
class FramePool {
 public:
  struct Result {
    std::uint64_t seq = 0;
    std::uint32_t packet_count = 0;
    Bytes raw;         // masked input, kept for datagram-budget re-cuts
    Bytes compressed;  // empty when dropped
    bool dropped = false;
    std::exception_ptr error;  // codec failure, rethrown by the consumer
  };

  FramePool(unsigned workers, std::size_t queue_capacity, CodecSettings settings,
            OverflowPolicy policy);
  ~FramePool();

  FramePool(const FramePool&) = delete;
  FramePool& operator=(const FramePool&) = delete;

  void submit(Bytes frame, std::uint32_t packet_count);

  /// Next result in submission order; blocks. nullopt once close() was
  /// called and everything submitted has been delivered.
  std::optional<Result> next_result();

  /// Non-blocking variant: nullopt when the next in-order result is not
  /// ready yet (single-threaded submit/drain loops use this).
  std::optional<Result> try_next_result();

  /// No more submissions; workers drain the queue.
  void close();

  /// Codec busy time accumulated across workers.
  double codec_time_s() const;

  std::uint64_t frames_dropped() const;
  std::uint64_t packets_dropped() const;

 private:
  struct Job {
    std::uint64_t seq;
    std::uint32_t packet_count;
    Bytes raw;
  };

  void worker_loop();
  std::optional<Result> take_ready();
  void drop_one_locked();  // evict the oldest droppable frame

  CodecSettings settings_;
  OverflowPolicy policy_;
  std::size_t capacity_;

  mutable std::mutex mutex_;
  std::condition_variable space_cv_;  // producer waits for room (kBlock)
  std::condition_variable work_cv_;   // workers wait for jobs
  std::condition_variable state_cv_;  // consumer / drop-oldest producer wait
  std::deque<Job> queue_;
  std::map<std::uint64_t, Result> done_;
  std::uint64_t next_seq_ = 0;      // next submission number
  std::uint64_t next_deliver_ = 0;  // next result the consumer gets
  std::size_t heavy_ = 0;           // frames holding payload bytes
  std::uint64_t dropped_frames_ = 0;
  std::uint64_t dropped_packets_ = 0;
  std::uint64_t codec_ns_ = 0;
  unsigned active_ = 0;  // jobs currently being compressed
  bool closed_ = false;
  std::vector<std::thread> workers_;
};

}  // namespace lmc::detail
