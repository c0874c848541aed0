// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include <lzma.h>

#include <cstdint>
#include <string>

#include "codec_backends.hpp"
#include "lmc/error.hpp"

namespace lmc::detail {

// .xz container with CRC64 integrity check, decodable by stock xz tools.

Bytes lzma_compress(ByteSpan data, int level) {
  Bytes out(lzma_stream_buffer_bound(data.size()));
  std::size_t out_pos = 0;
  const lzma_ret rc =
      lzma_easy_buffer_encode(static_cast<std::uint32_t>(level), LZMA_CHECK_CRC64, nullptr,
                              data.data(), data.size(), out.data(), &out_pos, out.size());
  if (rc != LZMA_OK) throw Error("lzma: encode failed, rc=" + std::to_string(rc));
  out.resize(out_pos);
  return out;
}

Bytes lzma_decompress(ByteSpan data, std::size_t expected_size) {
  lzma_stream strm = LZMA_STREAM_INIT;
  if (lzma_stream_decoder(&strm, UINT64_MAX, 0) != LZMA_OK) {
    throw Error("lzma: cannot initialize decoder");
  }

  Bytes out(expected_size > 0 ? expected_size : std::max<std::size_t>(data.size() * 4, 1024));
  strm.next_in = data.data();
  strm.avail_in = data.size();
  std::size_t produced = 0;

  while (true) {
    strm.next_out = out.data() + produced;
    strm.avail_out = out.size() - produced;
    const lzma_ret rc = lzma_code(&strm, LZMA_FINISH);
    produced = out.size() - strm.avail_out;
    if (rc == LZMA_STREAM_END) break;
    if (rc == LZMA_OK || rc == LZMA_BUF_ERROR) {
      if (strm.avail_out == 0) {
        out.resize(out.size() * 2);
        continue;
      }
      if (rc == LZMA_BUF_ERROR) {
        // Output space available but no progress possible: input ran out.
        lzma_end(&strm);
        throw TruncationError("lzma: stream ended prematurely");
      }
      continue;
    }
    lzma_end(&strm);
    if (rc == LZMA_DATA_ERROR) throw IntegrityError("lzma: corrupted stream");
    if (rc == LZMA_FORMAT_ERROR) throw IntegrityError("lzma: not an xz stream");
    throw Error("lzma: decode failed, rc=" + std::to_string(rc));
  }
  const bool trailing = strm.avail_in != 0;
  lzma_end(&strm);
  if (trailing) throw IntegrityError("lzma: trailing bytes after stream end");
  out.resize(produced);
  return out;
}

}  // namespace lmc::detail
