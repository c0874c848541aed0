// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include <bzlib.h>

#include <string>

#include "codec_backends.hpp"
#include "lmc/error.hpp"

// libbz2 is built with BZ_NO_STDIO and calls this on internal corruption.
extern "C" void bz_internal_error(int errcode) {
  throw lmc::Error("bzip2: internal error " + std::to_string(errcode));
}

namespace lmc::detail {

Bytes bzip2_compress(ByteSpan data, int level) {
  // Worst case per the bzip2 manual: input + 1% + 600 bytes.
  unsigned out_len = static_cast<unsigned>(data.size() + data.size() / 100 + 600);
  Bytes out(out_len);
  char dummy = 0;
  const char* src = data.empty() ? &dummy : reinterpret_cast<const char*>(data.data());
  const int rc = BZ2_bzBuffToBuffCompress(reinterpret_cast<char*>(out.data()), &out_len,
                                          const_cast<char*>(src),
                                          static_cast<unsigned>(data.size()), level, 0, 0);
  if (rc != BZ_OK) throw Error("bzip2: compress failed, rc=" + std::to_string(rc));
  out.resize(out_len);
  return out;
}

Bytes bzip2_decompress(ByteSpan data, std::size_t expected_size) {
  Bytes out(expected_size > 0 ? expected_size : std::max<std::size_t>(data.size() * 4, 1024));
  while (true) {
    unsigned out_len = static_cast<unsigned>(out.size());
    const int rc = BZ2_bzBuffToBuffDecompress(
        reinterpret_cast<char*>(out.data()), &out_len,
        const_cast<char*>(reinterpret_cast<const char*>(data.data())),
        static_cast<unsigned>(data.size()), 0, 0);
    switch (rc) {
      case BZ_OK:
        out.resize(out_len);
        return out;
      case BZ_OUTBUFF_FULL:
        out.resize(out.size() * 2);
        continue;
      case BZ_UNEXPECTED_EOF:
        throw TruncationError("bzip2: stream ended prematurely");
      case BZ_DATA_ERROR:
      case BZ_DATA_ERROR_MAGIC:
        throw IntegrityError("bzip2: corrupted stream, rc=" + std::to_string(rc));
      default:
        throw Error("bzip2: decompress failed, rc=" + std::to_string(rc));
    }
  }
}

}  // namespace lmc::detail
