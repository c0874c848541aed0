// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "lmc/bytes.hpp"

namespace lmc {

/// Lossless codec families. The numeric values are stable one-byte wire
/// identifiers used in stream headers.
enum class CodecId : std::uint8_t {
  kStore = 0,    // identity codec, for baselines and framing-overhead tests
  kDeflate = 1,  // zlib stream (RFC 1950)
  kBzip2 = 2,    // standard .bz2 stream
  kLzma = 3,     // .xz container
  kLz4 = 4,      // LZ4 frame format with content checksum
};

struct CodecSettings {
  /// Keeps the codec family's own default level.
  static constexpr int kDefaultLevel = -1;

  CodecId codec = CodecId::kStore;
  int level = kDefaultLevel;
};

struct CodecInfo {
  CodecId id;
  std::string_view name;
  bool available;      // compiled into this build
  int level_min;       // valid native level range (0/0 when levels are meaningless)
  int level_max;
  int level_default;
  bool streaming;      // backend consumes input incrementally
};

/// Compresses data. Output decompresses to exactly the input; STORE
/// returns the input unchanged. Deterministic for fixed input and
/// settings. Throws CapabilityError if the codec is not in this build,
/// ParameterError on an invalid level.
Bytes compress(ByteSpan data, const CodecSettings& settings);

/// Inverse of compress. `expected_size` is an allocation hint only; the
/// result is whatever the stream decodes to. Throws IntegrityError on
/// corrupted input and TruncationError on truncated input.
Bytes decompress(ByteSpan data, const CodecSettings& settings, std::size_t expected_size = 0);

/// All codec ids known to the wire format, with availability flags for
/// this build. STORE is always available.
std::vector<CodecInfo> list_codecs();

bool codec_available(CodecId id);
std::string_view codec_name(CodecId id);

/// Parses "store", "deflate", "bzip2", "lzma", "lz4" (plus the aliases
/// "gzip" -> deflate and "xz" -> lzma). Empty optional when unknown.
std::optional<CodecId> codec_from_name(std::string_view name);

}  // namespace lmc
