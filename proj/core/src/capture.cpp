// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lmc/capture.hpp"

#include <array>
#include <cstring>
#include <istream>
#include <ostream>

#include "lmc/container.hpp"
#include "lmc/error.hpp"

namespace lmc {
namespace {

constexpr std::uint32_t kMagicUsec = 0xA1B2C3D4;
constexpr std::uint32_t kMagicUsecSwapped = 0xD4C3B2A1;
constexpr std::uint32_t kMagicNsec = 0xA1B23C4D;
constexpr std::uint32_t kMagicNsecSwapped = 0x4D3CB2A1;

constexpr std::uint32_t kLinkTypeEthernet = 1;
constexpr std::size_t kGlobalHeaderSize = 24;
constexpr std::size_t kRecordHeaderSize = 16;
constexpr std::size_t kEthernetHeaderSize = 14;
constexpr std::uint16_t kEtherTypeIpv4 = 0x0800;
constexpr std::uint8_t kIpProtoUdp = 17;

// Caps a single record so a corrupt length cannot trigger a huge allocation.
constexpr std::uint32_t kMaxRecordLen = 1u << 26;

std::uint32_t swap32(std::uint32_t v) {
  return ((v & 0xFF) << 24) | ((v & 0xFF00) << 8) | ((v >> 8) & 0xFF00) | (v >> 24);
}

std::uint16_t ipv4_header_checksum(const std::uint8_t* hdr, std::size_t len) {
  std::uint32_t sum = 0;
  for (std::size_t i = 0; i + 1 < len; i += 2) sum += load_be16(hdr + i);
  while (sum >> 16) sum = (sum & 0xFFFF) + (sum >> 16);
  return static_cast<std::uint16_t>(~sum);
}

}  // namespace

PcapReader::PcapReader(std::istream& in, PcapFilter filter) : in_(in), filter_(filter) {
  std::array<std::uint8_t, kGlobalHeaderSize> hdr{};
  in_.read(reinterpret_cast<char*>(hdr.data()), hdr.size());
  if (in_.gcount() != static_cast<std::streamsize>(hdr.size())) {
    throw FormatError("pcap global header truncated");
  }
  const std::uint32_t magic = load_le32(hdr.data());
  switch (magic) {
    case kMagicUsec:
      break;
    case kMagicNsec:
      nanosecond_ = true;
      break;
    case kMagicUsecSwapped:
      swapped_ = true;
      break;
    case kMagicNsecSwapped:
      swapped_ = true;
      nanosecond_ = true;
      break;
    default:
      throw FormatError("not a pcap file (bad magic)");
  }
  std::uint32_t link_type = load_le32(hdr.data() + 20);
  if (swapped_) link_type = swap32(link_type);
  if (link_type != kLinkTypeEthernet) {
    throw FormatError("unsupported pcap link type " + std::to_string(link_type));
  }
}

std::optional<TimedPacket> PcapReader::next() {
  std::array<std::uint8_t, kRecordHeaderSize> hdr{};
  while (true) {
    in_.read(reinterpret_cast<char*>(hdr.data()), hdr.size());
    if (in_.gcount() == 0 && in_.eof()) return std::nullopt;
    if (in_.gcount() != static_cast<std::streamsize>(hdr.size())) {
      throw TruncationError("pcap record header cut short");
    }
    std::uint32_t ts_sec = load_le32(&hdr[0]);
    std::uint32_t ts_frac = load_le32(&hdr[4]);
    std::uint32_t incl_len = load_le32(&hdr[8]);
    if (swapped_) {
      ts_sec = swap32(ts_sec);
      ts_frac = swap32(ts_frac);
      incl_len = swap32(incl_len);
    }
    if (incl_len > kMaxRecordLen) throw FormatError("pcap record length is implausible");

    record_buf_.resize(incl_len);
    in_.read(reinterpret_cast<char*>(record_buf_.data()), incl_len);
    if (in_.gcount() != static_cast<std::streamsize>(incl_len)) {
      throw TruncationError("pcap record cut short");
    }
    ++stats_.records;

    const std::uint8_t* frame = record_buf_.data();

    // Ethernet -> IPv4, skipping anything else (ARP, VLAN, IPv6, ...).
    if (incl_len < kEthernetHeaderSize + 20 ||
        load_be16(frame + 12) != kEtherTypeIpv4) {
      ++stats_.non_udp;
      continue;
    }
    const std::uint8_t* ip = frame + kEthernetHeaderSize;
    const std::size_t ip_avail = incl_len - kEthernetHeaderSize;
    if ((ip[0] >> 4) != 4) {
      ++stats_.non_udp;
      continue;
    }
    const std::size_t ihl = (ip[0] & 0x0F) * std::size_t{4};
    if (ihl < 20 || ip_avail < ihl + 8) {
      ++stats_.non_udp;
      continue;
    }
    const std::uint16_t frag = load_be16(ip + 6);
    if ((frag & 0x1FFF) != 0 || (frag & 0x2000) != 0) {
      ++stats_.fragmented;  // fragment offset or more-fragments set
      continue;
    }
    if (ip[9] != kIpProtoUdp) {
      ++stats_.non_udp;
      continue;
    }

    const std::uint8_t* udp = ip + ihl;
    const std::uint16_t dst_port = load_be16(udp + 2);
    const std::uint16_t udp_len = load_be16(udp + 4);
    if (dst_port != filter_.udp_dst_port) {
      ++stats_.wrong_port;
      continue;
    }
    const std::size_t captured_payload =
        std::min<std::size_t>(ip_avail - ihl - 8, udp_len >= 8 ? udp_len - std::size_t{8} : 0);
    if (captured_payload != filter_.payload_size) {
      ++stats_.wrong_size;
      continue;
    }

    Timestamp ts{ts_sec, nanosecond_ ? ts_frac : ts_frac * 1000u};
    if (!first_ts_) first_ts_ = ts;
    last_ts_ = ts;
    ++stats_.matched;
    const std::uint8_t* payload = udp + 8;
    return TimedPacket{ts, Bytes(payload, payload + captured_payload)};
  }
}

double PcapReader::dataset_duration_s() const {
  if (!first_ts_) return 0.0;
  return last_ts_.to_seconds() - first_ts_->to_seconds();
}

RawReader::RawReader(std::istream& in, std::uint32_t packet_size)
    : in_(in), packet_size_(packet_size) {
  if (packet_size_ == 0) throw ParameterError("packet_size must be positive");
}

std::optional<TimedPacket> RawReader::next() {
  if (eof_) return std::nullopt;
  Bytes payload(packet_size_);
  in_.read(reinterpret_cast<char*>(payload.data()), packet_size_);
  const auto got = in_.gcount();
  if (got != static_cast<std::streamsize>(packet_size_)) {
    eof_ = true;
    if (got != 0) truncated_tail_ = true;
    return std::nullopt;
  }
  const std::uint64_t total_ns = packets_ * static_cast<std::uint64_t>(kNominalPacketInterval.count());
  ++packets_;
  return TimedPacket{{total_ns / 1'000'000'000, static_cast<std::uint32_t>(total_ns % 1'000'000'000)},
                     std::move(payload)};
}

double RawReader::dataset_duration_s() const {
  return static_cast<double>(packets_) * std::chrono::duration<double>(kNominalPacketInterval).count();
}

MemorySource::MemorySource(ByteSpan packets, std::uint32_t packet_size)
    : data_(packets), packet_size_(packet_size) {
  if (packet_size_ == 0) throw ParameterError("packet_size must be positive");
  if (data_.size() % packet_size_ != 0) {
    throw StructuralError("buffer is not a whole number of packets");
  }
}

std::optional<TimedPacket> MemorySource::next() {
  const std::uint64_t count = data_.size() / packet_size_;
  if (index_ >= count) return std::nullopt;
  const std::uint8_t* p = data_.data() + index_ * packet_size_;
  const std::uint64_t total_ns = index_ * static_cast<std::uint64_t>(kNominalPacketInterval.count());
  ++index_;
  return TimedPacket{{total_ns / 1'000'000'000, static_cast<std::uint32_t>(total_ns % 1'000'000'000)},
                     Bytes(p, p + packet_size_)};
}

double MemorySource::dataset_duration_s() const {
  return static_cast<double>(index_) * std::chrono::duration<double>(kNominalPacketInterval).count();
}

PcapWriter::PcapWriter(std::ostream& out, std::uint16_t udp_port) : out_(out), port_(udp_port) {}

void PcapWriter::write(const TimedPacket& packet) {
  if (!header_written_) {
    std::array<std::uint8_t, kGlobalHeaderSize> hdr{};
    store_le32(&hdr[0], kMagicUsec);
    store_le16(&hdr[4], 2);   // version 2.4
    store_le16(&hdr[6], 4);
    store_le32(&hdr[16], 65535);  // snaplen
    store_le32(&hdr[20], kLinkTypeEthernet);
    out_.write(reinterpret_cast<const char*>(hdr.data()), hdr.size());
    header_written_ = true;
  }

  const std::size_t payload_len = packet.payload.size();
  const std::size_t frame_len = kEthernetHeaderSize + 20 + 8 + payload_len;

  std::array<std::uint8_t, kRecordHeaderSize> rec{};
  store_le32(&rec[0], static_cast<std::uint32_t>(packet.ts.sec));
  store_le32(&rec[4], packet.ts.nsec / 1000);  // microsecond file format
  store_le32(&rec[8], static_cast<std::uint32_t>(frame_len));
  store_le32(&rec[12], static_cast<std::uint32_t>(frame_len));
  out_.write(reinterpret_cast<const char*>(rec.data()), rec.size());

  // Placeholder addresses; payload fidelity is the contract.
  std::array<std::uint8_t, kEthernetHeaderSize + 20 + 8> hdrs{};
  static constexpr std::uint8_t kDstMac[6] = {0x02, 0x00, 0x00, 0x00, 0x00, 0x02};
  static constexpr std::uint8_t kSrcMac[6] = {0x02, 0x00, 0x00, 0x00, 0x00, 0x01};
  std::memcpy(&hdrs[0], kDstMac, 6);
  std::memcpy(&hdrs[6], kSrcMac, 6);
  store_be16(&hdrs[12], kEtherTypeIpv4);

  std::uint8_t* ip = &hdrs[kEthernetHeaderSize];
  ip[0] = 0x45;  // IPv4, 20-byte header
  store_be16(ip + 2, static_cast<std::uint16_t>(20 + 8 + payload_len));
  ip[8] = 64;  // TTL
  ip[9] = kIpProtoUdp;
  const std::uint8_t src_ip[4] = {10, 0, 0, 1};
  const std::uint8_t dst_ip[4] = {10, 0, 0, 2};
  std::memcpy(ip + 12, src_ip, 4);
  std::memcpy(ip + 16, dst_ip, 4);
  store_be16(ip + 10, ipv4_header_checksum(ip, 20));

  std::uint8_t* udp = ip + 20;
  store_be16(udp + 0, port_);
  store_be16(udp + 2, port_);
  store_be16(udp + 4, static_cast<std::uint16_t>(8 + payload_len));
  // UDP checksum 0: legal for IPv4, meaning "not computed".

  out_.write(reinterpret_cast<const char*>(hdrs.data()), hdrs.size());
  out_.write(reinterpret_cast<const char*>(packet.payload.data()),
             static_cast<std::streamsize>(payload_len));
}

void RawWriter::write(const TimedPacket& packet) {
  out_.write(reinterpret_cast<const char*>(packet.payload.data()),
             static_cast<std::streamsize>(packet.payload.size()));
}

CaptureFormat detect_format(std::istream& in) {
  const auto pos = in.tellg();
  std::array<std::uint8_t, 4> magic{};
  in.read(reinterpret_cast<char*>(magic.data()), magic.size());
  const bool got4 = in.gcount() == 4;
  in.clear();
  in.seekg(pos);

  if (!got4) return CaptureFormat::kRaw;
  const std::uint32_t m = load_le32(magic.data());
  if (m == kMagicUsec || m == kMagicUsecSwapped || m == kMagicNsec || m == kMagicNsecSwapped) {
    return CaptureFormat::kPcap;
  }
  if (std::equal(StreamHeader::kMagic.begin(), StreamHeader::kMagic.end(), magic.begin())) {
    return CaptureFormat::kLmcContainer;
  }
  return CaptureFormat::kRaw;
}

std::unique_ptr<PacketSource> open_packet_source(std::istream& in, CaptureFormat format,
                                                 std::uint32_t packet_size, PcapFilter filter) {
  switch (format) {
    case CaptureFormat::kPcap:
      return std::make_unique<PcapReader>(in, filter);
    case CaptureFormat::kRaw:
      return std::make_unique<RawReader>(in, packet_size);
    case CaptureFormat::kLmcContainer:
      throw ParameterError("input is an LMC container, not a capture");
  }
  throw ParameterError("unknown capture format");
}

}  // namespace lmc
