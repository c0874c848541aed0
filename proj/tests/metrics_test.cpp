// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lmc/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "lmc/capture.hpp"
#include "lmc/error.hpp"
#include "synth.hpp"

namespace lmc {
namespace {

// Two-pass reference implementation, independent of the streaming
// accumulator: first pass collects errors, second computes moments.
struct TwoPassStats {
  double mean = 0, stddev = 0, max = 0;
  std::uint64_t count = 0, nulls = 0;
};

TwoPassStats two_pass_oracle(ByteSpan original, ByteSpan masked, const PacketLayout& layout) {
  std::vector<double> errors;
  TwoPassStats out;
  const std::size_t ps = layout.packet_size();
  for (std::size_t pos = 0; pos < original.size(); pos += ps) {
    for (const auto& f : layout.range_fields()) {
      const std::uint32_t d = read_field(original.subspan(pos, ps), f);
      if (d == 0) {
        ++out.nulls;
        continue;
      }
      const std::uint32_t dp = read_field(masked.subspan(pos, ps), f);
      errors.push_back((d - dp) * layout.step_size_mm());
    }
  }
  out.count = errors.size();
  if (errors.empty()) return out;
  double sum = 0;
  for (double e : errors) {
    sum += e;
    out.max = std::max(out.max, e);
  }
  out.mean = sum / static_cast<double>(errors.size());
  double var = 0;
  for (double e : errors) var += (e - out.mean) * (e - out.mean);
  out.stddev = std::sqrt(var / static_cast<double>(errors.size()));  // population
  return out;
}

ErrorStats stats_for(ByteSpan original, const PacketLayout& layout, unsigned n) {
  Bytes masked(original.begin(), original.end());
  apply_mask_batch(masked, PacketMask(layout, n));
  MemorySource a(original, layout.packet_size());
  MemorySource b(masked, layout.packet_size());
  return error_stats(a, b, layout, n);
}

TEST(ErrorStats, MaskedWithZeroBitsIsZeroError) {
  std::mt19937 rng(1);
  const Bytes stream = testutil::random_stream(reference_layout(), 20, rng);
  const ErrorStats stats = stats_for(stream, reference_layout(), 0);
  EXPECT_EQ(stats.mean_mm, 0.0);
  EXPECT_EQ(stats.std_mm, 0.0);
  EXPECT_EQ(stats.max_mm, 0.0);
  EXPECT_EQ(stats.theoretical_max_mm, 0.0);
  EXPECT_GT(stats.count, 0u);
}

// Uniform residues mod 2^4 at n = 4, s = 2 mm: mean exactly 15 mm, sigma
// exactly sqrt(255/12) * 2 mm, max exactly 30 mm.
TEST(ErrorStats, UniformResidueClosedForm) {
  const PacketLayout& layout = reference_layout();
  const Bytes stream = testutil::uniform_residue_stream(layout, 32, 4);
  const ErrorStats stats = stats_for(stream, layout, 4);

  EXPECT_DOUBLE_EQ(stats.mean_mm, 15.0);
  const double expected_std = std::sqrt(255.0 / 12.0) * 2.0;  // 9.21954...
  EXPECT_NEAR(stats.std_mm, expected_std, expected_std * 1e-12);
  EXPECT_DOUBLE_EQ(stats.max_mm, 30.0);
  EXPECT_DOUBLE_EQ(stats.theoretical_max_mm, 30.0);
  EXPECT_EQ(stats.nulls_excluded, 0u);

  // Cross-check against the independent two-pass computation.
  Bytes masked(stream.begin(), stream.end());
  apply_mask_batch(masked, PacketMask(layout, 4));
  const TwoPassStats oracle = two_pass_oracle(stream, masked, layout);
  EXPECT_NEAR(stats.mean_mm, oracle.mean, 1e-9);
  EXPECT_NEAR(stats.std_mm, oracle.stddev, 1e-9);
  EXPECT_EQ(stats.count, oracle.count);
}

// Exhaustive input (every 16-bit value once): the residues are exactly
// uniform, so the mean masking error over all values is ((2^n - 1)/2)*s
// in closed form. ErrorStats excludes raw 0 (the null return, error 0),
// which removes one zero-error sample from the population; both numbers
// are checked exactly thanks to the integer accumulation.
TEST(ErrorStats, ExhaustiveInputClosedFormMean) {
  const PacketLayout layout(2, {{0, 16, ByteOrder::kLsbFirst}}, 2.0, 15, 30.0);
  Bytes stream;
  stream.reserve(2 * 65536);
  for (std::uint32_t raw = 0; raw <= 0xFFFF; ++raw) {
    Bytes packet(2);
    write_field(packet, layout.range_fields()[0], raw);
    stream.insert(stream.end(), packet.begin(), packet.end());
  }
  for (unsigned n : {1u, 4u, 8u, 15u}) {
    // Full-population closed form, computed over all 65536 values with
    // the shift oracle.
    std::uint64_t sum = 0;
    for (std::uint32_t raw = 0; raw <= 0xFFFF; ++raw) sum += raw - ((raw >> n) << n);
    const double full_mean_mm = static_cast<double>(sum) / 65536.0 * 2.0;
    const double closed_form = ((std::ldexp(1.0, static_cast<int>(n)) - 1.0) / 2.0) * 2.0;
    ASSERT_DOUBLE_EQ(full_mean_mm, closed_form) << "n=" << n;

    // ErrorStats sees the same error sum over one sample fewer (raw 0,
    // error 0, excluded as a null return).
    const ErrorStats stats = stats_for(stream, layout, n);
    const double expected = static_cast<double>(sum) / 65535.0 * 2.0;
    EXPECT_DOUBLE_EQ(stats.mean_mm, expected) << "n=" << n;
    EXPECT_EQ(stats.nulls_excluded, 1u);
    EXPECT_EQ(stats.count, 65535u);
  }
}

TEST(ErrorStats, AgreesWithTwoPassOnRandomStreams) {
  const PacketLayout& layout = reference_layout();
  std::mt19937 rng(7);
  const Bytes stream = testutil::random_stream(layout, 50, rng);
  for (unsigned n : {2u, 4u, 9u}) {
    const ErrorStats stats = stats_for(stream, layout, n);
    Bytes masked(stream.begin(), stream.end());
    apply_mask_batch(masked, PacketMask(layout, n));
    const TwoPassStats oracle = two_pass_oracle(stream, masked, layout);
    EXPECT_NEAR(stats.mean_mm, oracle.mean, std::abs(oracle.mean) * 1e-9 + 1e-12);
    EXPECT_NEAR(stats.std_mm, oracle.stddev, std::abs(oracle.stddev) * 1e-9 + 1e-12);
    EXPECT_DOUBLE_EQ(stats.max_mm, oracle.max);
    EXPECT_EQ(stats.count, oracle.count);
    EXPECT_EQ(stats.nulls_excluded, oracle.nulls);
    EXPECT_LE(stats.mean_mm, stats.max_mm);
    EXPECT_LE(stats.max_mm, stats.theoretical_max_mm);
  }
}

TEST(ErrorStats, CountMismatchThrows) {
  const PacketLayout& layout = reference_layout();
  std::mt19937 rng(9);
  const Bytes a = testutil::random_stream(layout, 3, rng);
  const Bytes b = testutil::random_stream(layout, 2, rng);
  MemorySource sa(a, layout.packet_size());
  MemorySource sb(b, layout.packet_size());
  EXPECT_THROW(error_stats(sa, sb, layout, 4), StructuralError);
}

TEST(Report, RptArithmetic) {
  CompressionReport report;
  report.original_bytes = 1000;
  report.compressed_bytes = 300;
  report.dataset_duration_s = 10.0;
  report.processing_time_s = 1.5;
  report = finalize_report(report);
  EXPECT_DOUBLE_EQ(report.rfs, 0.3);
  EXPECT_DOUBLE_EQ(report.rpt, 0.15);
  EXPECT_TRUE(report.real_time);

  report.processing_time_s = 15.0;
  report = finalize_report(report);
  EXPECT_FALSE(report.real_time);
}

TEST(Report, ZeroDurationIsParameterError) {
  CompressionReport report;
  report.dataset_duration_s = 0.0;
  EXPECT_THROW(finalize_report(report), ParameterError);
}

TEST(Sweep, SingleStoreCell) {
  const PacketLayout& layout = reference_layout();
  std::mt19937 rng(11);
  const Bytes stream = testutil::random_stream(layout, 10, rng);
  const SweepResult result = sweep(stream, 10 * 1.33e-3, layout, {0}, {{CodecId::kStore}});
  ASSERT_EQ(result.cells.size(), 1u);
  const SweepCell& cell = result.cells[0];
  ASSERT_TRUE(cell.ok);
  // STORE keeps the payload; rfs is 1 plus container overhead.
  EXPECT_GE(cell.report.rfs, 1.0);
  EXPECT_LT(cell.report.rfs, 1.01);
  EXPECT_EQ(cell.error.mean_mm, 0.0);
}

TEST(Sweep, RfsNonIncreasingInN) {
  const PacketLayout& layout = reference_layout();
  const Bytes stream = testutil::structured_stream(layout, 300, 13);
  const SweepResult result =
      sweep(stream, 300 * 1.33e-3, layout, {0, 2, 4, 6, 8}, {{CodecId::kDeflate}});
  ASSERT_EQ(result.cells.size(), 5u);
  for (std::size_t i = 1; i < result.cells.size(); ++i) {
    ASSERT_TRUE(result.cells[i].ok);
    EXPECT_LE(result.cells[i].report.rfs, result.cells[i - 1].report.rfs * 1.01)
        << "n=" << result.cells[i].masked_bits;
  }
}

TEST(Sweep, ErrorStatsIndependentOfCodec) {
  const PacketLayout& layout = reference_layout();
  std::mt19937 rng(15);
  const Bytes stream = testutil::random_stream(layout, 8, rng);
  const SweepResult result =
      sweep(stream, 8 * 1.33e-3, layout, {4}, {{CodecId::kStore}, {CodecId::kDeflate}, {CodecId::kLz4}});
  ASSERT_EQ(result.cells.size(), 3u);
  for (const auto& cell : result.cells) {
    ASSERT_TRUE(cell.ok);
    EXPECT_DOUBLE_EQ(cell.error.mean_mm, result.cells[0].error.mean_mm);
    EXPECT_DOUBLE_EQ(cell.error.std_mm, result.cells[0].error.std_mm);
    EXPECT_LE(cell.error.max_mm, cell.error.theoretical_max_mm);
  }
}

TEST(Sweep, CsvShape) {
  const PacketLayout& layout = reference_layout();
  std::mt19937 rng(17);
  const Bytes stream = testutil::random_stream(layout, 5, rng);
  const SweepResult result =
      sweep(stream, 5 * 1.33e-3, layout, {0, 4}, {{CodecId::kStore}, {CodecId::kLz4}});
  std::ostringstream csv;
  write_sweep_csv(result, csv);

  std::istringstream lines(csv.str());
  std::string line;
  int rows = 0;
  std::getline(lines, line);
  EXPECT_EQ(line.substr(0, 8), "n,codec,");
  while (std::getline(lines, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 15);  // 16 columns
    ++rows;
  }
  EXPECT_EQ(rows, 4);

  std::ostringstream json;
  write_sweep_json(result, json);
  EXPECT_NE(json.str().find("\"rfs\""), std::string::npos);
}

TEST(Sweep, RowErrorLeavesOtherCellsAlive) {
  // A masked_bits value beyond the layout bound fails that row's cells
  // but the sweep still completes the rest.
  const PacketLayout& layout = reference_layout();
  std::mt19937 rng(19);
  const Bytes stream = testutil::random_stream(layout, 3, rng);
  const SweepResult result = sweep(stream, 1.0, layout, {4, 16}, {{CodecId::kStore}});
  ASSERT_EQ(result.cells.size(), 2u);
  EXPECT_TRUE(result.cells[0].ok);
  EXPECT_FALSE(result.cells[1].ok);
  EXPECT_FALSE(result.cells[1].error_message.empty());
}

}  // namespace
}  // namespace lmc
