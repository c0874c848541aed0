// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>

#include "lmc/bytes.hpp"
#include "lmc/codec.hpp"
#include "lmc/packet_model.hpp"

namespace lmc {

/// CRC-32 (IEEE 802.3, reflected polynomial 0xEDB88320) of a byte span.
std::uint32_t crc32(ByteSpan data);

/// Self-describing header of a compressed masked packet stream (.lmc).
/// Encoded little-endian, 21 bytes:
///   magic "LMC1" | version u8 | codec u8 | masked_bits u8 |
///   packet_size u16 | step_size_um u32 | layout_hash u64
struct StreamHeader {
  static constexpr std::array<std::uint8_t, 4> kMagic{'L', 'M', 'C', '1'};
  static constexpr std::uint8_t kVersion = 1;
  static constexpr std::size_t kEncodedSize = 21;

  std::uint8_t version = kVersion;
  CodecId codec = CodecId::kStore;
  std::uint8_t masked_bits = 0;
  std::uint16_t packet_size = 0;
  std::uint32_t step_size_um = 0;
  std::uint64_t layout_hash = 0;

  std::array<std::uint8_t, kEncodedSize> encode() const;

  /// Throws FormatError on bad magic or unsupported version.
  static StreamHeader decode(ByteSpan bytes);

  bool operator==(const StreamHeader&) const = default;
};

StreamHeader make_stream_header(const PacketLayout& layout, unsigned masked_bits, CodecId codec);

/// Frame header, 12 bytes little-endian:
///   packet_count u32 | compressed_len u32 | crc32(compressed payload) u32
/// A terminal frame (all zero) marks clean end-of-stream.
struct FrameHeader {
  static constexpr std::size_t kEncodedSize = 12;

  std::uint32_t packet_count = 0;
  std::uint32_t compressed_len = 0;
  std::uint32_t checksum = 0;

  bool is_terminal() const { return packet_count == 0 && compressed_len == 0; }

  std::array<std::uint8_t, kEncodedSize> encode() const;
  static FrameHeader decode(ByteSpan bytes);  // needs exactly kEncodedSize bytes
};

/// Sequential container writer. Frames are compressed independently so a
/// reader (or a lossy relay link) can decode any frame given only the
/// stream header.
class StreamWriter {
 public:
  /// Writes the header immediately. settings.codec must equal header.codec.
  StreamWriter(std::ostream& out, const StreamHeader& header, const CodecSettings& settings);

  /// Compresses and emits one frame. `packets` must be a non-empty whole
  /// multiple of packet_size (StructuralError otherwise).
  void write_frame(ByteSpan packets);

  /// Emits an already-compressed frame (parallel pipelines compress on
  /// worker threads and hand results here in order).
  void write_compressed_frame(std::uint32_t packet_count, ByteSpan payload);

  /// Writes the terminal frame. No frames may be written afterwards.
  void finish();

  std::uint64_t frames_written() const { return frames_; }
  std::uint64_t bytes_written() const { return bytes_written_; }

 private:
  std::ostream& out_;
  StreamHeader header_;
  CodecSettings settings_;
  std::uint64_t frames_ = 0;
  std::uint64_t bytes_written_ = 0;
  bool finished_ = false;
};

/// Sequential container reader with optional recovery.
///
/// next_frame() throws FormatError / IntegrityError / TruncationError as
/// soon as a frame fails a check. After a throw, recover() scans forward
/// for the next position from which the remaining frame chain parses
/// cleanly (checksums verified) through the terminal frame; if it
/// returns true the caller may call next_frame() again. Recovery needs a
/// seekable stream.
class StreamReader {
 public:
  struct Frame {
    std::uint64_t index = 0;
    std::uint32_t packet_count = 0;
    std::uint32_t compressed_len = 0;
    Bytes packets;  // decompressed, packet_count * packet_size bytes
  };

  /// Reads and validates the stream header. Throws FormatError.
  explicit StreamReader(std::istream& in);

  const StreamHeader& header() const { return header_; }

  /// Next decoded frame, or nullopt once the terminal frame was consumed.
  std::optional<Frame> next_frame();

  /// Attempts to resynchronize after next_frame() threw. Returns false
  /// when no later frame chain validates (nothing more can be read).
  bool recover();

  bool reached_terminal() const { return terminal_seen_; }

  /// Index next_frame() will assign to the next frame it parses. After a
  /// throw, the failed frame's index is next_frame_index() - 1.
  std::uint64_t next_frame_index() const { return next_index_; }

 private:
  bool chain_validates(std::uint64_t offset, std::uint64_t end);

  std::istream& in_;
  StreamHeader header_;
  std::uint64_t next_index_ = 0;
  std::uint64_t frame_start_ = 0;   // stream offset of the frame being parsed
  std::uint64_t resume_offset_ = 0; // first offset recover() should try
  bool terminal_seen_ = false;
  bool failed_ = false;
};

/// One-shot strict helpers over the classes above.
Bytes write_stream(ByteSpan packets, const StreamHeader& header, const CodecSettings& settings,
                   std::uint32_t frame_size);
std::pair<StreamHeader, Bytes> read_stream(ByteSpan container);

}  // namespace lmc
