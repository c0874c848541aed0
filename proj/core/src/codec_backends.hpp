// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "lmc/bytes.hpp"

namespace lmc::detail {

// Per-family one-shot entry points. Levels arrive already range-checked;
// kDefaultLevel (-1) means the family default.

Bytes deflate_compress(ByteSpan data, int level);
Bytes deflate_decompress(ByteSpan data, std::size_t expected_size);

Bytes lz4_compress(ByteSpan data, int level);
Bytes lz4_decompress(ByteSpan data, std::size_t expected_size);

#if LMC_HAVE_BZIP2
Bytes bzip2_compress(ByteSpan data, int level);
Bytes bzip2_decompress(ByteSpan data, std::size_t expected_size);
#endif

#if LMC_HAVE_LZMA
Bytes lzma_compress(ByteSpan data, int level);
Bytes lzma_decompress(ByteSpan data, std::size_t expected_size);
#endif

}  // namespace lmc::detail
