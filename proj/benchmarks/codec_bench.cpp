// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "lmc/codec.hpp"
#include "lmc/mask.hpp"
#include "synth.hpp"

namespace {

using namespace lmc;

/// One 100-packet frame of scene-like data, masked at the given n.
Bytes frame_at(unsigned n) {
  const PacketLayout& layout = reference_layout();
  Bytes frame = testutil::structured_stream(layout, 100, 99);
  apply_mask_batch(frame, PacketMask(layout, n));
  return frame;
}

void BM_CompressFrame(benchmark::State& state) {
  const CodecSettings settings{static_cast<CodecId>(state.range(0))};
  if (!codec_available(settings.codec)) {
    state.SkipWithError("codec not built");
    return;
  }
  const Bytes frame = frame_at(static_cast<unsigned>(state.range(1)));

  std::size_t compressed_size = 0;
  for (auto _ : state) {
    const Bytes out = compress(frame, settings);
    compressed_size = out.size();
    benchmark::DoNotOptimize(out.data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * frame.size());
  state.counters["rfs"] =
      static_cast<double>(compressed_size) / static_cast<double>(frame.size());
}

void CodecGrid(benchmark::internal::Benchmark* b) {
  for (int codec : {0, 1, 2, 3, 4}) {
    for (int n : {0, 4}) b->Args({codec, n});
  }
}
BENCHMARK(BM_CompressFrame)->Apply(CodecGrid);

void BM_DecompressFrame(benchmark::State& state) {
  const CodecSettings settings{static_cast<CodecId>(state.range(0))};
  if (!codec_available(settings.codec)) {
    state.SkipWithError("codec not built");
    return;
  }
  const Bytes frame = frame_at(4);
  const Bytes compressed = compress(frame, settings);

  for (auto _ : state) {
    const Bytes out = decompress(compressed, settings, frame.size());
    benchmark::DoNotOptimize(out.data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * frame.size());
}
BENCHMARK(BM_DecompressFrame)->Arg(0)->Arg(1)->Arg(2)->Arg(3)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
