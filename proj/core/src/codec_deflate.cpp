// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include <zlib.h>

#include "codec_backends.hpp"
#include "lmc/error.hpp"

namespace lmc::detail {

// zlib stream (RFC 1950): raw deflate plus the 2-byte header and the
// adler32 trailer, which is what flags corrupted input on inflate.

Bytes deflate_compress(ByteSpan data, int level) {
  uLongf out_len = compressBound(static_cast<uLong>(data.size()));
  Bytes out(out_len);
  const int rc = compress2(out.data(), &out_len, data.data(), static_cast<uLong>(data.size()),
                           level);
  if (rc != Z_OK) throw Error("deflate: compress2 failed, rc=" + std::to_string(rc));
  out.resize(out_len);
  return out;
}

Bytes deflate_decompress(ByteSpan data, std::size_t expected_size) {
  z_stream zs{};
  if (inflateInit(&zs) != Z_OK) throw Error("deflate: inflateInit failed");

  Bytes out(expected_size > 0 ? expected_size : std::max<std::size_t>(data.size() * 4, 1024));
  zs.next_in = const_cast<Bytef*>(data.data());
  zs.avail_in = static_cast<uInt>(data.size());

  int rc = Z_OK;
  std::size_t produced = 0;
  while (true) {
    zs.next_out = out.data() + produced;
    zs.avail_out = static_cast<uInt>(out.size() - produced);
    rc = inflate(&zs, Z_NO_FLUSH);
    produced = out.size() - zs.avail_out;
    if (rc == Z_STREAM_END) break;
    if (rc == Z_OK || rc == Z_BUF_ERROR) {
      if (zs.avail_out == 0) {
        out.resize(out.size() * 2);
        continue;
      }
      // Out of input without reaching the stream end.
      inflateEnd(&zs);
      throw TruncationError("deflate: stream ended prematurely");
    }
    inflateEnd(&zs);
    throw IntegrityError("deflate: corrupted stream, rc=" + std::to_string(rc));
  }
  const bool trailing = zs.avail_in != 0;
  inflateEnd(&zs);
  if (trailing) throw IntegrityError("deflate: trailing bytes after stream end");
  out.resize(produced);
  return out;
}

}  // namespace lmc::detail
