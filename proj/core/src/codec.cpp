// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lmc/codec.hpp"

#include <sstream>

#include "codec_backends.hpp"
#include "lmc/error.hpp"

namespace lmc {
namespace {

struct FamilyLimits {
  int min, max, def;
  bool streaming;
};

FamilyLimits limits(CodecId id) {
  switch (id) {
    case CodecId::kStore:
      return {0, 0, 0, true};
    case CodecId::kDeflate:
      return {0, 9, 6, true};
    case CodecId::kBzip2:
      return {1, 9, 9, false};
    case CodecId::kLzma:
      return {0, 9, 6, true};
    case CodecId::kLz4:
      return {0, 12, 0, false};
  }
  throw CapabilityError("unknown codec id " +
                        std::to_string(static_cast<unsigned>(id)));
}

int resolve_level(const CodecSettings& settings) {
  const FamilyLimits lim = limits(settings.codec);
  if (settings.level == CodecSettings::kDefaultLevel) return lim.def;
  if (settings.level < lim.min || settings.level > lim.max) {
    std::ostringstream msg;
    msg << "level " << settings.level << " outside [" << lim.min << ", " << lim.max << "] for "
        << codec_name(settings.codec);
    throw ParameterError(msg.str());
  }
  return settings.level;
}

[[noreturn]] [[maybe_unused]] void throw_unavailable(CodecId id) {
  throw CapabilityError(std::string(codec_name(id)) + " codec is not available in this build");
}

}  // namespace

Bytes compress(ByteSpan data, const CodecSettings& settings) {
  const int level = resolve_level(settings);
  switch (settings.codec) {
    case CodecId::kStore:
      return Bytes(data.begin(), data.end());
    case CodecId::kDeflate:
      return detail::deflate_compress(data, level);
    case CodecId::kLz4:
      return detail::lz4_compress(data, level);
    case CodecId::kBzip2:
#if LMC_HAVE_BZIP2
      return detail::bzip2_compress(data, level);
#else
      throw_unavailable(settings.codec);
#endif
    case CodecId::kLzma:
#if LMC_HAVE_LZMA
      return detail::lzma_compress(data, level);
#else
      throw_unavailable(settings.codec);
#endif
  }
  throw CapabilityError("unknown codec id " +
                        std::to_string(static_cast<unsigned>(settings.codec)));
}

Bytes decompress(ByteSpan data, const CodecSettings& settings, std::size_t expected_size) {
  switch (settings.codec) {
    case CodecId::kStore:
      return Bytes(data.begin(), data.end());
    case CodecId::kDeflate:
      return detail::deflate_decompress(data, expected_size);
    case CodecId::kLz4:
      return detail::lz4_decompress(data, expected_size);
    case CodecId::kBzip2:
#if LMC_HAVE_BZIP2
      return detail::bzip2_decompress(data, expected_size);
#else
      throw_unavailable(settings.codec);
#endif
    case CodecId::kLzma:
#if LMC_HAVE_LZMA
      return detail::lzma_decompress(data, expected_size);
#else
      throw_unavailable(settings.codec);
#endif
  }
  throw CapabilityError("unknown codec id " +
                        std::to_string(static_cast<unsigned>(settings.codec)));
}

std::vector<CodecInfo> list_codecs() {
  std::vector<CodecInfo> out;
  for (CodecId id : {CodecId::kStore, CodecId::kDeflate, CodecId::kBzip2, CodecId::kLzma,
                     CodecId::kLz4}) {
    const FamilyLimits lim = limits(id);
    out.push_back({id, codec_name(id), codec_available(id), lim.min, lim.max, lim.def,
                   lim.streaming});
  }
  return out;
}

bool codec_available(CodecId id) {
  switch (id) {
    case CodecId::kStore:
    case CodecId::kDeflate:
    case CodecId::kLz4:
      return true;
    case CodecId::kBzip2:
      return LMC_HAVE_BZIP2 != 0;
    case CodecId::kLzma:
      return LMC_HAVE_LZMA != 0;
  }
  return false;
}

std::string_view codec_name(CodecId id) {
  switch (id) {
    case CodecId::kStore:
      return "store";
    case CodecId::kDeflate:
      return "deflate";
    case CodecId::kBzip2:
      return "bzip2";
    case CodecId::kLzma:
      return "lzma";
    case CodecId::kLz4:
      return "lz4";
  }
  return "unknown";
}

std::optional<CodecId> codec_from_name(std::string_view name) {
  if (name == "store") return CodecId::kStore;
  if (name == "deflate" || name == "gzip" || name == "zlib") return CodecId::kDeflate;
  if (name == "bzip2" || name == "bz2") return CodecId::kBzip2;
  if (name == "lzma" || name == "xz") return CodecId::kLzma;
  if (name == "lz4") return CodecId::kLz4;
  return std::nullopt;
}

}  // namespace lmc
