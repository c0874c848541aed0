// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lmc/metrics.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "lmc/capture.hpp"
#include "lmc/container.hpp"
#include "lmc/error.hpp"
#include "lmc/pipeline.hpp"

namespace lmc {

ErrorAccumulator::ErrorAccumulator(const PacketLayout& layout, unsigned masked_bits)
    : layout_(layout), masked_bits_(masked_bits) {}

void ErrorAccumulator::add_packet_pair(ByteSpan original, ByteSpan masked) {
  if (original.size() != layout_.packet_size() || masked.size() != layout_.packet_size()) {
    throw StructuralError("packet length does not match the layout");
  }
  for (const auto& field : layout_.range_fields()) {
    const std::uint32_t d = read_field(original, field);
    if (d == 0) {
      ++nulls_;  // null return: no echo, invariant under masking
      continue;
    }
    const std::uint32_t dp = read_field(masked, field);
    const std::uint32_t err = d - dp;  // masking never increases a value
    ++count_;
    sum_ += err;
    sum_sq_ += static_cast<std::uint64_t>(err) * err;
    if (err > max_raw_) max_raw_ = err;
  }
}

ErrorStats ErrorAccumulator::finalize() const {
  ErrorStats stats;
  stats.count = count_;
  stats.nulls_excluded = nulls_;
  stats.theoretical_max_mm = error_bound(masked_bits_, layout_.step_size_mm()).attainable_max_mm;
  if (count_ == 0) return stats;

  const double step = layout_.step_size_mm();
  const double mean_raw = static_cast<double>(sum_) / static_cast<double>(count_);
  const double mean_sq_raw = static_cast<double>(sum_sq_) / static_cast<double>(count_);
  stats.mean_mm = mean_raw * step;
  stats.std_mm = std::sqrt(std::max(0.0, mean_sq_raw - mean_raw * mean_raw)) * step;
  stats.max_mm = max_raw_ * step;
  return stats;
}

ErrorStats error_stats(PacketSource& original, PacketSource& masked, const PacketLayout& layout,
                       unsigned masked_bits) {
  ErrorAccumulator acc(layout, masked_bits);
  while (true) {
    auto a = original.next();
    auto b = masked.next();
    if (a.has_value() != b.has_value()) {
      throw StructuralError("packet streams have different lengths");
    }
    if (!a) break;
    acc.add_packet_pair(a->payload, b->payload);
  }
  return acc.finalize();
}

CompressionReport finalize_report(CompressionReport report) {
  if (!(report.dataset_duration_s > 0.0)) {
    throw ParameterError("dataset duration must be positive");
  }
  report.rfs = report.original_bytes == 0
                   ? 0.0
                   : static_cast<double>(report.compressed_bytes) /
                         static_cast<double>(report.original_bytes);
  report.rpt = report.processing_time_s / report.dataset_duration_s;
  report.real_time = report.rpt < 1.0;
  return report;
}

namespace {

/// ostream sink that only counts, for size-only pipeline runs.
class CountingBuf : public std::streambuf {
 public:
  std::uint64_t count = 0;

 protected:
  int overflow(int ch) override {
    ++count;
    return ch;
  }
  std::streamsize xsputn(const char*, std::streamsize n) override {
    count += static_cast<std::uint64_t>(n);
    return n;
  }
};

}  // namespace

SweepResult sweep(ByteSpan packets, double dataset_duration_s, const PacketLayout& layout,
                  const std::vector<unsigned>& n_values, const std::vector<CodecSettings>& codecs,
                  std::uint32_t frame_size, unsigned workers) {
  SweepResult result;
  for (unsigned n : n_values) {
    // Error statistics depend only on n; compute once per row.
    ErrorStats row_error;
    std::string row_error_failure;
    try {
      const PacketMask mask(layout, n);
      Bytes masked(packets.begin(), packets.end());
      apply_mask_batch(masked, mask);
      MemorySource a(packets, layout.packet_size());
      MemorySource b(masked, layout.packet_size());
      row_error = error_stats(a, b, layout, n);
    } catch (const Error& e) {
      row_error_failure = e.what();
    }

    for (const auto& codec : codecs) {
      SweepCell cell;
      cell.masked_bits = n;
      cell.codec = codec.codec;
      if (!row_error_failure.empty()) {
        cell.error_message = row_error_failure;
        result.cells.push_back(std::move(cell));
        continue;
      }
      cell.error = row_error;
      try {
        PipelineConfig config;
        config.masked_bits = n;
        config.codec = codec;
        config.frame_size = frame_size;
        config.worker_count = workers;
        MemorySource source(packets, layout.packet_size());
        CountingBuf counter;
        std::ostream null_out(&counter);
        cell.report = compress_capture(source, null_out, layout, config);
        cell.report.dataset_duration_s = dataset_duration_s;
        cell.report = finalize_report(cell.report);
        cell.ok = true;
      } catch (const Error& e) {
        cell.error_message = e.what();
      }
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

}  // namespace

void write_sweep_csv(const SweepResult& result, std::ostream& out) {
  out << "n,codec,original_bytes,compressed_bytes,rfs,mask_time_s,codec_time_s,"
         "processing_time_s,duration_s,rpt,err_count,err_mean_mm,err_std_mm,err_max_mm,"
         "err_theoretical_max_mm,nulls_excluded\n";
  for (const auto& cell : result.cells) {
    out << cell.masked_bits << ',' << codec_name(cell.codec) << ',';
    if (cell.ok) {
      const auto& r = cell.report;
      const auto& e = cell.error;
      out << r.original_bytes << ',' << r.compressed_bytes << ',' << fmt_double(r.rfs) << ','
          << fmt_double(r.mask_time_s) << ',' << fmt_double(r.codec_time_s) << ','
          << fmt_double(r.processing_time_s) << ',' << fmt_double(r.dataset_duration_s) << ','
          << fmt_double(r.rpt) << ',' << e.count << ',' << fmt_double(e.mean_mm) << ','
          << fmt_double(e.std_mm) << ',' << fmt_double(e.max_mm) << ','
          << fmt_double(e.theoretical_max_mm) << ',' << e.nulls_excluded;
    } else {
      out << ",,,,,,,,,,,,,";
    }
    out << '\n';
  }
}

void write_sweep_json(const SweepResult& result, std::ostream& out) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& cell : result.cells) {
    nlohmann::json j;
    j["n"] = cell.masked_bits;
    j["codec"] = std::string(codec_name(cell.codec));
    if (cell.ok) {
      const auto& r = cell.report;
      const auto& e = cell.error;
      j["original_bytes"] = r.original_bytes;
      j["compressed_bytes"] = r.compressed_bytes;
      j["rfs"] = r.rfs;
      j["mask_time_s"] = r.mask_time_s;
      j["codec_time_s"] = r.codec_time_s;
      j["processing_time_s"] = r.processing_time_s;
      j["duration_s"] = r.dataset_duration_s;
      j["rpt"] = r.rpt;
      j["real_time"] = r.real_time;
      j["err_count"] = e.count;
      j["err_mean_mm"] = e.mean_mm;
      j["err_std_mm"] = e.std_mm;
      j["err_max_mm"] = e.max_mm;
      j["err_theoretical_max_mm"] = e.theoretical_max_mm;
      j["nulls_excluded"] = e.nulls_excluded;
    } else {
      j["error"] = cell.error_message;
    }
    doc.push_back(std::move(j));
  }
  out << doc.dump(2) << '\n';
}

}  // namespace lmc
