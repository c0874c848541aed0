// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lmc/bytes.hpp"
#include "lmc/codec.hpp"
#include "lmc/mask.hpp"
#include "lmc/packet_model.hpp"

namespace lmc {

class PacketSource;

/// Aggregate accuracy loss over a stream, in millimeters. Null returns
/// (raw value 0) are excluded from the statistics and counted separately:
/// masking maps 0 to 0, so they would only dilute the mean.
struct ErrorStats {
  std::uint64_t count = 0;          // measurements included
  double mean_mm = 0.0;             // mu
  double std_mm = 0.0;              // sigma, population standard deviation
  double max_mm = 0.0;              // largest observed error
  double theoretical_max_mm = 0.0;  // (2^n - 1) * step_size_mm
  std::uint64_t nulls_excluded = 0;
};

/// Single-pass error accumulator. Raw errors are integers, so the sums
/// are kept exactly in 64-bit integers; mean and sigma are derived at
/// finalize time. Memory is O(1) in the stream length. Single writer.
class ErrorAccumulator {
 public:
  ErrorAccumulator(const PacketLayout& layout, unsigned masked_bits);

  /// Accumulates per-field errors between one original packet and its
  /// masked counterpart. Throws StructuralError on a length mismatch.
  void add_packet_pair(ByteSpan original, ByteSpan masked);

  ErrorStats finalize() const;

 private:
  const PacketLayout& layout_;
  unsigned masked_bits_;
  std::uint64_t count_ = 0;
  std::uint64_t nulls_ = 0;
  std::uint64_t sum_ = 0;      // raw units; overflows after ~5e14 measurements
  std::uint64_t sum_sq_ = 0;   // raw units squared; overflows after ~1.7e10
  std::uint32_t max_raw_ = 0;
};

/// Per-measurement error statistics between two equal-length packet
/// streams of the same layout. Throws StructuralError on a count mismatch.
ErrorStats error_stats(PacketSource& original, PacketSource& masked, const PacketLayout& layout,
                       unsigned masked_bits);

/// Size and time indicators of one compression run.
///   RFS = compressed bytes / original bytes
///   RPT = processing wall time / dataset sensor-time duration
/// RPT below one means the stream can be processed in real time.
struct CompressionReport {
  std::uint64_t original_bytes = 0;
  std::uint64_t compressed_bytes = 0;
  double rfs = 0.0;
  double dataset_duration_s = 0.0;
  double processing_time_s = 0.0;
  double rpt = 0.0;
  double mask_time_s = 0.0;
  double codec_time_s = 0.0;
  CodecId codec = CodecId::kStore;
  unsigned masked_bits = 0;
  std::uint64_t packets = 0;
  bool real_time = false;  // rpt < 1.0
};

/// Fills the derived fields (rfs, rpt, real_time) from the measured ones.
/// Throws ParameterError on zero or negative duration.
CompressionReport finalize_report(CompressionReport report);

/// One (n, codec) cell of a sweep.
struct SweepCell {
  unsigned masked_bits = 0;
  CodecId codec = CodecId::kStore;
  ErrorStats error;
  CompressionReport report;
  bool ok = false;
  std::string error_message;  // set when the cell failed; sweep continues
};

struct SweepResult {
  std::vector<SweepCell> cells;  // ordered by (n, codec) as requested
};

/// Runs the full (n x codec) matrix over an in-memory packet buffer.
/// Error statistics are computed once per n (they do not depend on the
/// codec) and repeated across that row's cells.
SweepResult sweep(ByteSpan packets, double dataset_duration_s, const PacketLayout& layout,
                  const std::vector<unsigned>& n_values, const std::vector<CodecSettings>& codecs,
                  std::uint32_t frame_size = 100, unsigned workers = 1);

/// CSV schema (fixed column order):
///   n, codec, original_bytes, compressed_bytes, rfs, mask_time_s,
///   codec_time_s, processing_time_s, duration_s, rpt, err_count,
///   err_mean_mm, err_std_mm, err_max_mm, err_theoretical_max_mm,
///   nulls_excluded
/// Failed cells keep n and codec and leave the metric columns empty.
void write_sweep_csv(const SweepResult& result, std::ostream& out);

/// JSON mirror of the CSV, one object per cell, plus an "error" field on
/// failed cells.
void write_sweep_json(const SweepResult& result, std::ostream& out);

}  // namespace lmc
