// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "frame_pool.hpp"

#include <chrono>

#include "lmc/error.hpp"

namespace lmc::detail {

using Clock = std::chrono::steady_clock;

FramePool::FramePool(unsigned workers, std::size_t queue_capacity, CodecSettings settings,
                     OverflowPolicy policy)
    : settings_(settings), policy_(policy), capacity_(queue_capacity) {
  if (workers == 0) throw ParameterError("worker count must be at least 1");
  if (queue_capacity == 0) throw ParameterError("queue capacity must be at least 1");
  workers_.reserve(workers);
  for (unsigned i = 0; i < workers; ++i) {
    workers_.emplace_back([this] { worker_loop(); });
  }
}

FramePool::~FramePool() {
  close();
  for (auto& t : workers_) {
    if (t.joinable()) t.join();
  }
}

void FramePool::drop_one_locked() {
  if (!queue_.empty()) {
    Job victim = std::move(queue_.front());
    queue_.pop_front();
    ++dropped_frames_;
    dropped_packets_ += victim.packet_count;
    --heavy_;
    Result r;
    r.seq = victim.seq;
    r.packet_count = victim.packet_count;
    r.dropped = true;
    done_.emplace(r.seq, std::move(r));
    state_cv_.notify_all();
    return;
  }
  // Nothing queued: evict the oldest finished-but-undelivered frame.
  for (auto& [seq, result] : done_) {
    if (result.dropped || result.error) continue;
    ++dropped_frames_;
    dropped_packets_ += result.packet_count;
    result.raw = Bytes();
    result.compressed = Bytes();
    result.dropped = true;
    --heavy_;
    return;
  }
}

void FramePool::submit(Bytes frame, std::uint32_t packet_count) {
  std::unique_lock lock(mutex_);
  if (closed_) throw Error("frame pool is closed");

  if (policy_ == OverflowPolicy::kBlock) {
    // Bound the pending queue; workers drain it without the consumer's
    // help, so this never deadlocks a submit-then-drain loop.
    space_cv_.wait(lock, [this] { return queue_.size() < capacity_; });
  } else {
    while (heavy_ >= capacity_) {
      if (queue_.empty() && active_ == heavy_) {
        // Every held frame is inside a worker; wait for one to finish.
        state_cv_.wait(lock);
        continue;
      }
      drop_one_locked();
    }
  }
  ++heavy_;
  queue_.push_back({next_seq_++, packet_count, std::move(frame)});
  work_cv_.notify_one();
}

void FramePool::worker_loop() {
  while (true) {
    Job job;
    {
      std::unique_lock lock(mutex_);
      work_cv_.wait(lock, [this] { return !queue_.empty() || closed_; });
      if (queue_.empty()) return;  // closed and drained
      job = std::move(queue_.front());
      queue_.pop_front();
      ++active_;
      space_cv_.notify_one();
    }

    const auto t0 = Clock::now();
    Bytes compressed;
    std::exception_ptr error;
    try {
      compressed = compress(job.raw, settings_);
    } catch (...) {
      error = std::current_exception();
    }
    const auto ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();

    {
      std::unique_lock lock(mutex_);
      codec_ns_ += static_cast<std::uint64_t>(ns);
      Result r;
      r.seq = job.seq;
      r.packet_count = job.packet_count;
      r.raw = std::move(job.raw);
      r.compressed = std::move(compressed);
      r.error = error;
      done_.emplace(r.seq, std::move(r));
      --active_;
      state_cv_.notify_all();
    }
  }
}

std::optional<FramePool::Result> FramePool::take_ready() {
  auto it = done_.find(next_deliver_);
  if (it == done_.end()) return std::nullopt;
  Result r = std::move(it->second);
  done_.erase(it);
  ++next_deliver_;
  if (!r.dropped) {
    --heavy_;
    space_cv_.notify_one();
    state_cv_.notify_all();
  }
  return r;
}

std::optional<FramePool::Result> FramePool::next_result() {
  std::unique_lock lock(mutex_);
  state_cv_.wait(lock, [this] {
    return done_.contains(next_deliver_) ||
           (closed_ && queue_.empty() && active_ == 0 && next_deliver_ == next_seq_);
  });
  return take_ready();
}

std::optional<FramePool::Result> FramePool::try_next_result() {
  std::unique_lock lock(mutex_);
  return take_ready();
}

void FramePool::close() {
  std::unique_lock lock(mutex_);
  if (closed_) return;
  closed_ = true;
  work_cv_.notify_all();
  state_cv_.notify_all();
  space_cv_.notify_all();
}

double FramePool::codec_time_s() const {
  std::unique_lock lock(mutex_);
  return static_cast<double>(codec_ns_) * 1e-9;
}

std::uint64_t FramePool::frames_dropped() const {
  std::unique_lock lock(mutex_);
  return dropped_frames_;
}

std::uint64_t FramePool::packets_dropped() const {
  std::unique_lock lock(mutex_);
  return dropped_packets_;
}

}  // namespace lmc::detail
