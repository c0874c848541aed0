// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include <lz4frame.h>

#include <cstring>

#include "codec_backends.hpp"
#include "lmc/error.hpp"

namespace lmc::detail {
namespace {

// LZ4 frame format with xxhash content checksum, decodable by the stock
// lz4 tool. The content size header field doubles as the allocation hint.

LZ4F_preferences_t make_prefs(std::size_t content_size, int level) {
  LZ4F_preferences_t prefs{};
  prefs.frameInfo.contentChecksumFlag = LZ4F_contentChecksumEnabled;
  prefs.frameInfo.contentSize = content_size;
  prefs.compressionLevel = level;
  return prefs;
}

class DecompressionContext {
 public:
  DecompressionContext() {
    if (LZ4F_isError(LZ4F_createDecompressionContext(&ctx_, LZ4F_VERSION))) {
      throw Error("lz4: cannot create decompression context");
    }
  }
  ~DecompressionContext() { LZ4F_freeDecompressionContext(ctx_); }
  LZ4F_dctx* get() { return ctx_; }

 private:
  LZ4F_dctx* ctx_ = nullptr;
};

}  // namespace

Bytes lz4_compress(ByteSpan data, int level) {
  const LZ4F_preferences_t prefs = make_prefs(data.size(), level);
  Bytes out(LZ4F_compressFrameBound(data.size(), &prefs));
  const std::size_t written =
      LZ4F_compressFrame(out.data(), out.size(), data.data(), data.size(), &prefs);
  if (LZ4F_isError(written)) {
    throw Error(std::string("lz4: compressFrame failed: ") + LZ4F_getErrorName(written));
  }
  out.resize(written);
  return out;
}

Bytes lz4_decompress(ByteSpan data, std::size_t expected_size) {
  DecompressionContext ctx;
  Bytes out(expected_size > 0 ? expected_size : std::max<std::size_t>(data.size() * 4, 1024));

  std::size_t consumed = 0;
  std::size_t produced = 0;
  std::size_t ret = 1;  // nonzero: frame incomplete
  while (ret != 0) {
    if (produced == out.size()) out.resize(out.size() * 2);
    std::size_t dst_size = out.size() - produced;
    std::size_t src_size = data.size() - consumed;
    ret = LZ4F_decompress(ctx.get(), out.data() + produced, &dst_size, data.data() + consumed,
                          &src_size, nullptr);
    if (LZ4F_isError(ret)) {
      throw IntegrityError(std::string("lz4: corrupted frame: ") + LZ4F_getErrorName(ret));
    }
    produced += dst_size;
    consumed += src_size;
    if (ret != 0 && consumed == data.size()) {
      throw TruncationError("lz4: frame ended prematurely");
    }
  }
  if (consumed != data.size()) throw IntegrityError("lz4: trailing bytes after frame end");
  out.resize(produced);
  return out;
}

}  // namespace lmc::detail
