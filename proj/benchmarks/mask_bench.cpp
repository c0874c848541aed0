// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "lmc/mask.hpp"
#include "synth.hpp"

namespace {

using namespace lmc;

void BM_ApplyMaskBatch(benchmark::State& state) {
  const PacketLayout& layout = reference_layout();
  const PacketMask mask(layout, static_cast<unsigned>(state.range(0)));
  const std::size_t packets = 1024;
  Bytes buffer = testutil::structured_stream(layout, packets, 42);

  for (auto _ : state) {
    apply_mask_batch(buffer, mask);
    benchmark::DoNotOptimize(buffer.data());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * packets);
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * buffer.size());
}
BENCHMARK(BM_ApplyMaskBatch)->Arg(0)->Arg(4)->Arg(8)->Arg(15);

void BM_ApplyMaskScalar(benchmark::State& state) {
  const PacketLayout& layout = reference_layout();
  const PacketMask mask(layout, 4);
  Bytes packet = testutil::structured_stream(layout, 1, 7);

  for (auto _ : state) {
    apply_mask_inplace(packet, mask);
    benchmark::DoNotOptimize(packet.data());
  }
  state.SetItemsProcessed(state.iterations());
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * packet.size());
}
BENCHMARK(BM_ApplyMaskScalar);

void BM_BuildMask(benchmark::State& state) {
  const PacketLayout& layout = reference_layout();
  for (auto _ : state) {
    PacketMask mask(layout, 4);
    benchmark::DoNotOptimize(mask.bytes().data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BuildMask);

}  // namespace

BENCHMARK_MAIN();
