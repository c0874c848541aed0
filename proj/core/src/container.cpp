// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lmc/container.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "lmc/error.hpp"

namespace lmc {

namespace {

// Implausibly large values used to reject garbage frame headers early.
constexpr std::uint32_t kMaxPacketsPerFrame = 1u << 24;
constexpr std::uint32_t kMaxCompressedLen = 1u << 30;

std::string frame_msg(std::uint64_t index, const char* what) {
  std::ostringstream msg;
  msg << "frame " << index << ": " << what;
  return msg.str();
}

}  // namespace

std::uint32_t crc32(ByteSpan data) {
  return static_cast<std::uint32_t>(
      ::crc32(0L, data.empty() ? Z_NULL : data.data(), static_cast<uInt>(data.size())));
}

std::array<std::uint8_t, StreamHeader::kEncodedSize> StreamHeader::encode() const {
  std::array<std::uint8_t, kEncodedSize> out{};
  std::copy(kMagic.begin(), kMagic.end(), out.begin());
  out[4] = version;
  out[5] = static_cast<std::uint8_t>(codec);
  out[6] = masked_bits;
  store_le16(&out[7], packet_size);
  store_le32(&out[9], step_size_um);
  store_le64(&out[13], layout_hash);
  return out;
}

StreamHeader StreamHeader::decode(ByteSpan bytes) {
  if (bytes.size() < kEncodedSize) throw FormatError("stream header truncated");
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw FormatError("bad magic, not an LMC container");
  }
  StreamHeader h;
  h.version = bytes[4];
  if (h.version != kVersion) {
    throw FormatError("unsupported container version " + std::to_string(h.version));
  }
  h.codec = static_cast<CodecId>(bytes[5]);
  h.masked_bits = bytes[6];
  h.packet_size = load_le16(&bytes[7]);
  h.step_size_um = load_le32(&bytes[9]);
  h.layout_hash = load_le64(&bytes[13]);
  if (h.packet_size == 0) throw FormatError("stream header has zero packet size");
  return h;
}

StreamHeader make_stream_header(const PacketLayout& layout, unsigned masked_bits, CodecId codec) {
  StreamHeader h;
  h.codec = codec;
  h.masked_bits = static_cast<std::uint8_t>(masked_bits);
  h.packet_size = static_cast<std::uint16_t>(layout.packet_size());
  h.step_size_um = layout.step_size_um();
  h.layout_hash = layout.hash();
  return h;
}

std::array<std::uint8_t, FrameHeader::kEncodedSize> FrameHeader::encode() const {
  std::array<std::uint8_t, kEncodedSize> out{};
  store_le32(&out[0], packet_count);
  store_le32(&out[4], compressed_len);
  store_le32(&out[8], checksum);
  return out;
}

FrameHeader FrameHeader::decode(ByteSpan bytes) {
  if (bytes.size() < kEncodedSize) throw TruncationError("frame header truncated");
  return {load_le32(&bytes[0]), load_le32(&bytes[4]), load_le32(&bytes[8])};
}

StreamWriter::StreamWriter(std::ostream& out, const StreamHeader& header,
                           const CodecSettings& settings)
    : out_(out), header_(header), settings_(settings) {
  if (settings.codec != header.codec) {
    throw ParameterError("codec settings do not match the stream header");
  }
  const auto bytes = header_.encode();
  out_.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  bytes_written_ += bytes.size();
}

void StreamWriter::write_frame(ByteSpan packets) {
  if (packets.empty() || packets.size() % header_.packet_size != 0) {
    throw StructuralError("frame bytes are not a whole number of packets");
  }
  const Bytes payload = compress(packets, settings_);
  write_compressed_frame(static_cast<std::uint32_t>(packets.size() / header_.packet_size),
                         payload);
}

void StreamWriter::write_compressed_frame(std::uint32_t packet_count, ByteSpan payload) {
  if (finished_) throw Error("stream already finished");
  if (packet_count == 0) throw StructuralError("frame must hold at least one packet");
  FrameHeader fh{packet_count, static_cast<std::uint32_t>(payload.size()), crc32(payload)};
  const auto bytes = fh.encode();
  out_.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  out_.write(reinterpret_cast<const char*>(payload.data()),
             static_cast<std::streamsize>(payload.size()));
  bytes_written_ += bytes.size() + payload.size();
  ++frames_;
}

void StreamWriter::finish() {
  if (finished_) return;
  const auto bytes = FrameHeader{}.encode();
  out_.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  bytes_written_ += bytes.size();
  out_.flush();
  finished_ = true;
}

StreamReader::StreamReader(std::istream& in) : in_(in) {
  std::array<std::uint8_t, StreamHeader::kEncodedSize> buf{};
  in_.read(reinterpret_cast<char*>(buf.data()), buf.size());
  if (in_.gcount() != static_cast<std::streamsize>(buf.size())) {
    throw FormatError("stream header truncated");
  }
  header_ = StreamHeader::decode(buf);
  frame_start_ = StreamHeader::kEncodedSize;
}

std::optional<StreamReader::Frame> StreamReader::next_frame() {
  if (terminal_seen_) return std::nullopt;

  frame_start_ = static_cast<std::uint64_t>(in_.tellg());
  const std::uint64_t index = next_index_++;

  std::array<std::uint8_t, FrameHeader::kEncodedSize> hbuf{};
  in_.read(reinterpret_cast<char*>(hbuf.data()), hbuf.size());
  if (in_.gcount() == 0 && in_.eof()) {
    failed_ = true;
    resume_offset_ = frame_start_;  // nothing to scan past; recover() will fail
    throw TruncationError("missing terminal frame");
  }
  if (in_.gcount() != static_cast<std::streamsize>(hbuf.size())) {
    failed_ = true;
    resume_offset_ = frame_start_ + 1;
    throw TruncationError(frame_msg(index, "header cut short"));
  }
  const FrameHeader fh = FrameHeader::decode(hbuf);

  if (fh.is_terminal()) {
    if (fh.checksum != 0) {
      failed_ = true;
      resume_offset_ = frame_start_ + 1;
      throw IntegrityError(frame_msg(index, "corrupt terminal frame"), index);
    }
    terminal_seen_ = true;
    return std::nullopt;
  }
  if (fh.packet_count > kMaxPacketsPerFrame || fh.compressed_len > kMaxCompressedLen ||
      fh.compressed_len == 0) {
    failed_ = true;
    resume_offset_ = frame_start_ + 1;
    throw IntegrityError(frame_msg(index, "implausible frame header"), index);
  }

  Bytes payload(fh.compressed_len);
  in_.read(reinterpret_cast<char*>(payload.data()), payload.size());
  if (in_.gcount() != static_cast<std::streamsize>(payload.size())) {
    failed_ = true;
    resume_offset_ = frame_start_ + 1;
    throw TruncationError(frame_msg(index, "payload cut short"));
  }

  // After this point the next frame's position is known, so recovery can
  // try it directly before falling back to a scan.
  resume_offset_ = frame_start_ + FrameHeader::kEncodedSize + fh.compressed_len;

  if (crc32(payload) != fh.checksum) {
    failed_ = true;
    throw IntegrityError(frame_msg(index, "checksum mismatch"), index);
  }

  Bytes packets;
  try {
    packets = decompress(payload, CodecSettings{header_.codec},
                         std::size_t{fh.packet_count} * header_.packet_size);
  } catch (const CapabilityError&) {
    failed_ = true;
    throw;
  } catch (const Error& e) {
    failed_ = true;
    throw IntegrityError(frame_msg(index, e.what()), index);
  }
  if (packets.size() != std::size_t{fh.packet_count} * header_.packet_size) {
    failed_ = true;
    throw IntegrityError(frame_msg(index, "decompressed length does not match packet count"),
                         index);
  }
  return Frame{index, fh.packet_count, fh.compressed_len, std::move(packets)};
}

// A candidate offset is accepted only if the whole remaining frame chain
// parses cleanly from there: headers plausible, every checksum matches,
// and a terminal frame sits exactly at end of stream. CRC32 over each
// payload makes accidental matches inside compressed data vanishingly
// unlikely.
bool StreamReader::chain_validates(std::uint64_t offset, std::uint64_t end) {
  Bytes payload;
  while (true) {
    if (offset + FrameHeader::kEncodedSize > end) return false;
    in_.seekg(static_cast<std::streamoff>(offset));
    std::array<std::uint8_t, FrameHeader::kEncodedSize> hbuf{};
    in_.read(reinterpret_cast<char*>(hbuf.data()), hbuf.size());
    if (in_.gcount() != static_cast<std::streamsize>(hbuf.size())) return false;
    const FrameHeader fh = FrameHeader::decode(hbuf);
    if (fh.is_terminal()) {
      return fh.checksum == 0 && offset + FrameHeader::kEncodedSize == end;
    }
    if (fh.packet_count > kMaxPacketsPerFrame || fh.compressed_len > kMaxCompressedLen ||
        fh.compressed_len == 0) {
      return false;
    }
    if (offset + FrameHeader::kEncodedSize + fh.compressed_len > end) return false;
    payload.resize(fh.compressed_len);
    in_.read(reinterpret_cast<char*>(payload.data()), payload.size());
    if (in_.gcount() != static_cast<std::streamsize>(payload.size())) return false;
    if (crc32(payload) != fh.checksum) return false;
    offset += FrameHeader::kEncodedSize + fh.compressed_len;
  }
}

bool StreamReader::recover() {
  if (!failed_ || terminal_seen_) return false;
  in_.clear();

  in_.seekg(0, std::ios::end);
  const std::uint64_t end = static_cast<std::uint64_t>(in_.tellg());

  // Fast path: the failed frame's extent was known (payload corruption),
  // so the next frame usually starts right after it.
  if (resume_offset_ > frame_start_ + 1 && chain_validates(resume_offset_, end)) {
    in_.clear();
    in_.seekg(static_cast<std::streamoff>(resume_offset_));
    failed_ = false;
    return true;
  }
  // Slow path: scan forward for the first offset whose chain validates.
  for (std::uint64_t offset = frame_start_ + 1; offset + FrameHeader::kEncodedSize <= end;
       ++offset) {
    if (chain_validates(offset, end)) {
      in_.clear();
      in_.seekg(static_cast<std::streamoff>(offset));
      failed_ = false;
      return true;
    }
    in_.clear();
  }
  return false;
}

Bytes write_stream(ByteSpan packets, const StreamHeader& header, const CodecSettings& settings,
                   std::uint32_t frame_size) {
  if (frame_size == 0) throw ParameterError("frame_size must be at least 1");
  if (packets.size() % header.packet_size != 0) {
    throw StructuralError("packet buffer is not a whole number of packets");
  }
  std::ostringstream out(std::ios::binary);
  StreamWriter writer(out, header, settings);
  const std::size_t per_frame = std::size_t{frame_size} * header.packet_size;
  for (std::size_t pos = 0; pos < packets.size(); pos += per_frame) {
    writer.write_frame(packets.subspan(pos, std::min(per_frame, packets.size() - pos)));
  }
  writer.finish();
  const std::string s = out.str();
  return Bytes(s.begin(), s.end());
}

std::pair<StreamHeader, Bytes> read_stream(ByteSpan container) {
  std::istringstream in(std::string(container.begin(), container.end()), std::ios::binary);
  StreamReader reader(in);
  Bytes packets;
  while (auto frame = reader.next_frame()) {
    packets.insert(packets.end(), frame->packets.begin(), frame->packets.end());
  }
  return {reader.header(), std::move(packets)};
}

}  // namespace lmc
