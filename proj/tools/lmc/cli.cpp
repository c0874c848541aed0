// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "lmc/capture.hpp"
#include "lmc/codec.hpp"
#include "lmc/container.hpp"
#include "lmc/error.hpp"
#include "lmc/mask.hpp"
#include "lmc/metrics.hpp"
#include "lmc/packet_model.hpp"
#include "lmc/pipeline.hpp"
#include "lmc/relay.hpp"

namespace lmc::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::atomic<bool> g_interrupted{false};

void handle_sigint(int) { g_interrupted.store(true); }

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size() && !text.empty()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma - start);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// ---------------------------------------------------------------------
// Shared option plumbing

struct CommonOptions {
  unsigned bits = 0;
  std::string codec = "lz4";
  int level = CodecSettings::kDefaultLevel;
  std::uint32_t frame_size = 100;
  unsigned workers = 1;
  std::string format = "auto";
  std::uint16_t port = 2368;
  std::string layout_path;
  std::string report_arg;  // comma-separated paths

  std::vector<std::string> report_paths() const { return split_list(report_arg); }
};

unsigned default_workers() {
  if (const char* env = std::getenv("LMC_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && v <= 1024) return static_cast<unsigned>(v);
  }
  return 1;
}

PacketLayout load_layout(const std::string& path) {
  if (path.empty()) return reference_layout();
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open layout file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return layout_from_json(buf.str());
}

CodecSettings parse_codec(const std::string& name, int level) {
  const auto id = codec_from_name(name);
  if (!id) throw ParameterError("unknown codec \"" + name + "\"");
  return {*id, level};
}

Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon + 1 >= text.size()) {
    throw ParameterError("endpoint must be HOST:PORT, got \"" + text + "\"");
  }
  const long port = std::strtol(text.c_str() + colon + 1, nullptr, 10);
  if (port < 0 || port > 65535) throw ParameterError("port out of range in \"" + text + "\"");
  return {text.substr(0, colon), static_cast<std::uint16_t>(port)};
}

CaptureFormat input_format(const std::string& flag, std::istream& in) {
  if (flag == "pcap") return CaptureFormat::kPcap;
  if (flag == "raw") return CaptureFormat::kRaw;
  return detect_format(in);
}

struct OpenedCapture {
  std::ifstream file;
  std::unique_ptr<PacketSource> source;
};

OpenedCapture open_capture(const std::string& path, const std::string& format,
                           const PacketLayout& layout, std::uint16_t port) {
  OpenedCapture out;
  out.file.open(path, std::ios::binary);
  if (!out.file) throw ParameterError("cannot open input file " + path);
  const CaptureFormat fmt = input_format(format, out.file);
  out.source = open_packet_source(out.file, fmt, layout.packet_size(),
                                  {port, layout.packet_size()});
  return out;
}

struct LoadedCapture {
  Bytes packets;
  double duration_s = 0.0;
  std::uint64_t count = 0;
};

LoadedCapture load_capture(const std::string& path, const std::string& format,
                           const PacketLayout& layout, std::uint16_t port) {
  OpenedCapture in = open_capture(path, format, layout, port);
  LoadedCapture out;
  while (auto packet = in.source->next()) {
    out.packets.insert(out.packets.end(), packet->payload.begin(), packet->payload.end());
    ++out.count;
  }
  out.duration_s = in.source->dataset_duration_s();
  return out;
}

/// Removes a partially written output on failure.
class OutputFile {
 public:
  explicit OutputFile(const std::string& path) : path_(path) {
    stream_.open(path, std::ios::binary | std::ios::trunc);
    if (!stream_) throw ParameterError("cannot open output file " + path);
  }
  ~OutputFile() {
    if (!committed_) {
      stream_.close();
      std::error_code ec;
      fs::remove(path_, ec);
    }
  }
  std::ofstream& stream() { return stream_; }
  void commit() {
    stream_.flush();
    committed_ = true;
  }

 private:
  std::string path_;
  std::ofstream stream_;
  bool committed_ = false;
};

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ParameterError("cannot open report file " + path);
  out << text;
}

bool wants_json(const std::string& path) { return path.ends_with(".json"); }

// ---------------------------------------------------------------------
// Report rendering

json report_to_json(const CompressionReport& r) {
  return json{{"original_bytes", r.original_bytes},
              {"compressed_bytes", r.compressed_bytes},
              {"rfs", r.rfs},
              {"duration_s", r.dataset_duration_s},
              {"processing_time_s", r.processing_time_s},
              {"rpt", r.rpt},
              {"real_time", r.real_time},
              {"mask_time_s", r.mask_time_s},
              {"codec_time_s", r.codec_time_s},
              {"codec", std::string(codec_name(r.codec))},
              {"n", r.masked_bits},
              {"packets", r.packets}};
}

json stats_to_json(const ErrorStats& e) {
  return json{{"count", e.count},           {"mean_mm", e.mean_mm},
              {"std_mm", e.std_mm},         {"max_mm", e.max_mm},
              {"theoretical_max_mm", e.theoretical_max_mm},
              {"nulls_excluded", e.nulls_excluded}};
}

void emit_sweep_reports(const SweepResult& result, const std::vector<std::string>& paths) {
  for (const auto& path : paths) {
    std::ostringstream buf;
    if (wants_json(path)) {
      write_sweep_json(result, buf);
    } else {
      write_sweep_csv(result, buf);
    }
    write_text_file(path, buf.str());
  }
}

void print_report(std::ostream& err, const CompressionReport& r) {
  err << "  packets            " << r.packets << "\n"
      << "  original bytes     " << r.original_bytes << "\n"
      << "  compressed bytes   " << r.compressed_bytes << "\n"
      << "  RFS                " << std::fixed << std::setprecision(4) << r.rfs << "\n"
      << "  duration           " << std::setprecision(3) << r.dataset_duration_s << " s\n"
      << "  processing time    " << r.processing_time_s << " s (mask " << r.mask_time_s
      << " s, codec " << r.codec_time_s << " s)\n"
      << "  RPT                " << std::setprecision(4) << r.rpt
      << (r.real_time ? "  (real-time capable)" : "  (NOT real-time)") << "\n"
      << std::defaultfloat;
}

void print_relay_stats(std::ostream& err, const RelayStats& s, bool sender) {
  err << "  packets in         " << s.packets_in << "\n"
      << "  packets out        " << s.packets_out << "\n"
      << "  frames " << (sender ? "sent        " : "received    ")
      << (sender ? s.frames_sent : s.frames_received) << "\n"
      << "  frames dropped     " << s.frames_dropped << "\n";
  if (sender) {
    err << "  packets dropped    " << s.packets_dropped << "\n"
        << "  datagrams skipped  " << s.datagrams_skipped << "\n"
        << "  frames split       " << s.frames_split << "\n"
        << "  header requests    " << s.header_requests << "\n"
        << "  mask time          " << s.masking_time_s << " s\n"
        << "  codec time         " << s.codec_time_s << " s\n";
  } else {
    err << "  frames before hdr  " << s.frames_before_header << "\n";
  }
  err << "  bytes in/out       " << s.bytes_in << " / " << s.bytes_out << "\n"
      << "  wall time          " << s.wall_time_s << " s\n";
}

json relay_stats_to_json(const RelayStats& s) {
  return json{{"packets_in", s.packets_in},
              {"packets_out", s.packets_out},
              {"frames_sent", s.frames_sent},
              {"frames_received", s.frames_received},
              {"frames_dropped", s.frames_dropped},
              {"packets_dropped", s.packets_dropped},
              {"datagrams_skipped", s.datagrams_skipped},
              {"frames_split", s.frames_split},
              {"frames_before_header", s.frames_before_header},
              {"header_requests", s.header_requests},
              {"bytes_in", s.bytes_in},
              {"bytes_out", s.bytes_out},
              {"masking_time_s", s.masking_time_s},
              {"codec_time_s", s.codec_time_s},
              {"wall_time_s", s.wall_time_s}};
}

void emit_json_reports(const json& doc, const std::vector<std::string>& paths) {
  for (const auto& path : paths) write_text_file(path, doc.dump(2) + "\n");
}

// ---------------------------------------------------------------------
// Subcommands

int cmd_compress(const CommonOptions& opt, const std::string& input, const std::string& output,
                 std::ostream& err) {
  const PacketLayout layout = load_layout(opt.layout_path);
  PipelineConfig config;
  config.masked_bits = opt.bits;
  config.codec = parse_codec(opt.codec, opt.level);
  config.frame_size = opt.frame_size;
  config.worker_count = opt.workers;
  config.validate(layout);

  OpenedCapture in = open_capture(input, opt.format, layout, opt.port);
  OutputFile out(output);
  const CompressionReport report = compress_capture(*in.source, out.stream(), layout, config);
  out.commit();

  err << "compressed " << input << " -> " << output << " (n=" << opt.bits << ", "
      << opt.codec << ")\n";
  print_report(err, report);
  if (auto* pcap = dynamic_cast<PcapReader*>(in.source.get())) {
    const auto& s = pcap->stats();
    if (s.records != s.matched) {
      err << "  skipped records    " << (s.records - s.matched) << " (non-udp " << s.non_udp
          << ", port " << s.wrong_port << ", size " << s.wrong_size << ", fragmented "
          << s.fragmented << ")\n";
    }
  }
  emit_json_reports(report_to_json(report), opt.report_paths());
  return 0;
}

int cmd_decompress(const CommonOptions& opt, const std::string& input, const std::string& output,
                   std::ostream& err) {
  std::ifstream in(input, std::ios::binary);
  if (!in) throw ParameterError("cannot open input file " + input);

  std::string format = opt.format;
  if (format == "auto") {
    format = output.ends_with(".pcap") ? "pcap" : "raw";
  }

  OutputFile out(output);
  std::unique_ptr<PacketSink> sink;
  if (format == "pcap") {
    sink = std::make_unique<PcapWriter>(out.stream(), opt.port);
  } else {
    sink = std::make_unique<RawWriter>(out.stream());
  }

  const DecompressResult result = decompress_capture(in, *sink);
  out.commit();

  err << "decompressed " << input << " -> " << output << " (" << format << ", codec "
      << codec_name(result.report.codec) << ", n="
      << static_cast<unsigned>(result.report.masked_bits) << ")\n"
      << "  packets recovered  " << result.packets_recovered << "\n";
  if (!result.lost_frames.empty()) {
    err << "  LOST FRAMES       ";
    for (auto f : result.lost_frames) err << " " << f;
    err << "\n";
  }
  if (result.truncated) err << "  stream TRUNCATED (terminal frame missing)\n";

  json doc = report_to_json(result.report);
  doc["lost_frames"] = result.lost_frames;
  doc["truncated"] = result.truncated;
  doc["packets_recovered"] = result.packets_recovered;
  emit_json_reports(doc, opt.report_paths());
  return result.clean() ? 0 : 2;
}

int cmd_analyze(const CommonOptions& opt, const std::string& original,
                const std::string& masked_path, std::ostream& err) {
  const PacketLayout layout = load_layout(opt.layout_path);
  ErrorStats stats;
  if (masked_path.empty()) {
    // Mask in memory at the requested n and compare against the input.
    LoadedCapture capture = load_capture(original, opt.format, layout, opt.port);
    Bytes masked = capture.packets;
    apply_mask_batch(masked, PacketMask(layout, opt.bits));
    MemorySource a(capture.packets, layout.packet_size());
    MemorySource b(masked, layout.packet_size());
    stats = error_stats(a, b, layout, opt.bits);
    err << "analyze " << original << " at n=" << opt.bits << "\n";
  } else {
    OpenedCapture a = open_capture(original, opt.format, layout, opt.port);
    OpenedCapture b = open_capture(masked_path, opt.format, layout, opt.port);
    stats = error_stats(*a.source, *b.source, layout, opt.bits);
    err << "analyze " << original << " vs " << masked_path << " at n=" << opt.bits << "\n";
  }

  const ErrorBound bound = error_bound(opt.bits, layout.step_size_mm());
  err << std::fixed << std::setprecision(3)
      << "  measurements       " << stats.count << " (+" << stats.nulls_excluded
      << " null returns excluded)\n"
      << "  mean error         " << stats.mean_mm << " mm\n"
      << "  std deviation      " << stats.std_mm << " mm\n"
      << "  max error          " << stats.max_mm << " mm\n"
      << "  theoretical max    " << stats.theoretical_max_mm << " mm (strict bound "
      << bound.strict_bound_mm << " mm)\n"
      << std::defaultfloat;

  json doc = stats_to_json(stats);
  doc["n"] = opt.bits;
  doc["strict_bound_mm"] = bound.strict_bound_mm;
  emit_json_reports(doc, opt.report_paths());
  return 0;
}

int cmd_sweep(const CommonOptions& opt, const std::string& input,
              const std::vector<unsigned>& bits, const std::vector<std::string>& codec_names,
              std::ostream& err) {
  const PacketLayout layout = load_layout(opt.layout_path);
  std::vector<CodecSettings> codecs;
  if (codec_names.empty()) {
    for (const auto& info : list_codecs()) {
      if (info.available) codecs.push_back({info.id});
    }
  } else {
    for (const auto& name : codec_names) codecs.push_back(parse_codec(name, opt.level));
  }
  if (bits.empty()) throw ParameterError("--bits must list at least one value");

  LoadedCapture capture = load_capture(input, opt.format, layout, opt.port);
  if (capture.count == 0) throw ParameterError("input holds no packets");

  const SweepResult result = sweep(capture.packets, capture.duration_s, layout, bits, codecs,
                                   opt.frame_size, opt.workers);

  err << "sweep over " << capture.count << " packets (" << std::fixed << std::setprecision(2)
      << capture.duration_s << " s)\n"
      << "  n codec      rfs      rpt    err_mean_mm\n";
  for (const auto& cell : result.cells) {
    err << std::setw(3) << cell.masked_bits << " " << std::left << std::setw(8)
        << codec_name(cell.codec) << std::right;
    if (cell.ok) {
      err << std::setw(9) << std::setprecision(4) << cell.report.rfs << std::setw(9)
          << cell.report.rpt << std::setw(12) << std::setprecision(2) << cell.error.mean_mm
          << "\n";
    } else {
      err << "  FAILED: " << cell.error_message << "\n";
    }
  }
  err << std::defaultfloat;

  emit_sweep_reports(result, opt.report_paths());
  return 0;
}

int cmd_bench(const CommonOptions& opt, const std::string& input,
              const std::vector<std::string>& codec_names, std::ostream& err) {
  const PacketLayout layout = load_layout(opt.layout_path);
  std::vector<CodecSettings> codecs;
  if (codec_names.empty()) {
    for (const auto& info : list_codecs()) {
      if (info.available) codecs.push_back({info.id});
    }
  } else {
    for (const auto& name : codec_names) codecs.push_back(parse_codec(name, opt.level));
  }

  LoadedCapture capture = load_capture(input, opt.format, layout, opt.port);
  if (capture.duration_s < 1.0) {
    throw ParameterError("bench needs at least 1 s of sensor time (got " +
                         std::to_string(capture.duration_s) + " s); RPT would be meaningless");
  }

  const unsigned all_workers = std::max(1u, std::thread::hardware_concurrency());
  constexpr int kRuns = 3;
  json rows = json::array();

  err << "bench: " << capture.count << " packets, " << std::fixed << std::setprecision(2)
      << capture.duration_s << " s of sensor time, n=" << opt.bits << ", " << kRuns
      << " runs per configuration\n";
  err << "  workers codec      wall_s   mask_s  codec_s      rfs      rpt  mask_us/packet\n";

  for (const unsigned workers : {1u, all_workers}) {
    for (const auto& codec : codecs) {
      double wall = 0, mask = 0, codec_time = 0, rfs = 0;
      for (int run = 0; run < kRuns; ++run) {
        PipelineConfig config;
        config.masked_bits = opt.bits;
        config.codec = codec;
        config.frame_size = opt.frame_size;
        config.worker_count = workers;
        MemorySource source(capture.packets, layout.packet_size());
        std::ostringstream null_out(std::ios::binary);
        CompressionReport r = compress_capture(source, null_out, layout, config);
        r.dataset_duration_s = capture.duration_s;
        r = finalize_report(r);
        wall += r.processing_time_s;
        mask += r.mask_time_s;
        codec_time += r.codec_time_s;
        rfs = r.rfs;
      }
      wall /= kRuns;
      mask /= kRuns;
      codec_time /= kRuns;
      const double rpt = wall / capture.duration_s;
      const double mask_us =
          capture.count == 0 ? 0.0 : mask / static_cast<double>(capture.count) * 1e6;
      err << std::setw(9) << workers << " " << std::left << std::setw(8)
          << codec_name(codec.codec) << std::right << std::setprecision(4) << std::setw(9)
          << wall << std::setw(9) << mask << std::setw(9) << codec_time << std::setw(9) << rfs
          << std::setw(9) << rpt << std::setprecision(3) << std::setw(16) << mask_us << "\n";
      rows.push_back(json{{"workers", workers},
                          {"codec", std::string(codec_name(codec.codec))},
                          {"n", opt.bits},
                          {"runs", kRuns},
                          {"wall_s", wall},
                          {"mask_s", mask},
                          {"codec_s", codec_time},
                          {"rfs", rfs},
                          {"rpt", rpt},
                          {"mask_us_per_packet", mask_us}});
    }
  }
  err << std::defaultfloat;
  emit_json_reports(rows, opt.report_paths());
  return 0;
}

/// Runs a relay until SIGINT, --duration expiry, or a stop request.
template <typename Fn>
RelayStats run_until_stopped(double duration_s, Fn&& fn) {
  std::stop_source stop;
  std::jthread watchdog([&](std::stop_token wst) {
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(duration_s));
    while (!wst.stop_requested()) {
      if (g_interrupted.load()) break;
      if (duration_s > 0 && std::chrono::steady_clock::now() >= deadline) break;
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    stop.request_stop();
  });
  RelayStats stats = fn(stop.get_token());
  watchdog.request_stop();
  return stats;
}

int cmd_relay_send(const CommonOptions& opt, const std::string& listen, const std::string& dest,
                   const std::string& overflow, std::uint32_t flush_ms, double duration_s,
                   std::ostream& err) {
  const PacketLayout layout = load_layout(opt.layout_path);
  PipelineConfig config;
  config.masked_bits = opt.bits;
  config.codec = parse_codec(opt.codec, opt.level);
  config.frame_size = opt.frame_size;
  config.worker_count = opt.workers;
  config.flush_interval = std::chrono::milliseconds(flush_ms);
  if (overflow == "drop-oldest") {
    config.overflow = OverflowPolicy::kDropOldest;
  } else if (overflow != "block") {
    throw ParameterError("--overflow must be block or drop-oldest");
  }
  config.validate(layout);

  const Endpoint listen_ep = parse_endpoint(listen);
  const Endpoint dest_ep = parse_endpoint(dest);
  std::signal(SIGINT, handle_sigint);

  err << "relay-send: listening on " << listen_ep.host << ":" << listen_ep.port
      << ", sending to " << dest_ep.host << ":" << dest_ep.port << " (n=" << opt.bits << ", "
      << opt.codec << ", frame " << opt.frame_size << ")\n";
  const RelayStats stats = run_until_stopped(duration_s, [&](std::stop_token stop) {
    return run_relay_sender(listen_ep, dest_ep, layout, config, stop);
  });
  print_relay_stats(err, stats, true);
  emit_json_reports(relay_stats_to_json(stats), opt.report_paths());
  return 0;
}

int cmd_relay_recv(const CommonOptions& opt, const std::string& listen, const std::string& output,
                   double duration_s, std::ostream& err) {
  const Endpoint listen_ep = parse_endpoint(listen);
  std::string format = opt.format;
  if (format == "auto") format = output.ends_with(".pcap") ? "pcap" : "raw";

  std::signal(SIGINT, handle_sigint);
  OutputFile out(output);
  std::unique_ptr<PacketSink> sink;
  if (format == "pcap") {
    sink = std::make_unique<PcapWriter>(out.stream(), opt.port);
  } else {
    sink = std::make_unique<RawWriter>(out.stream());
  }

  err << "relay-recv: listening on " << listen_ep.host << ":" << listen_ep.port << " -> "
      << output << " (" << format << ")\n";
  const RelayStats stats = run_until_stopped(duration_s, [&](std::stop_token stop) {
    return run_relay_receiver(listen_ep, *sink, stop);
  });
  out.commit();
  print_relay_stats(err, stats, false);
  emit_json_reports(relay_stats_to_json(stats), opt.report_paths());
  return 0;
}

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_pipeline) {
  cmd->add_option("--format", opt.format, "Input/output format")
      ->check(CLI::IsMember({"auto", "pcap", "raw"}));
  cmd->add_option("--port", opt.port, "UDP port for pcap filtering/writing");
  cmd->add_option("--layout", opt.layout_path, "JSON packet layout descriptor");
  cmd->add_option("--report", opt.report_arg,
                  "Machine-readable report path(s), comma separated (.json or .csv)");
  if (with_pipeline) {
    cmd->add_option("-n,--bits", opt.bits, "Least significant bits to mask per range field");
    cmd->add_option("--codec", opt.codec, "Codec family: store, deflate, bzip2, lzma, lz4");
    cmd->add_option("--level", opt.level, "Codec-native level (default: family default)");
    cmd->add_option("--frame-size", opt.frame_size, "Packets per compressed frame");
    cmd->add_option("--workers", opt.workers, "Codec worker threads (env LMC_WORKERS)");
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  (void)out;
  CLI::App app{"lmc - masked LiDAR packet stream compression toolkit"};
  app.require_subcommand(1);

  CommonOptions opt;
  opt.workers = default_workers();
  std::string input, output, masked_path, listen, dest, overflow = "block";
  std::string bits_arg = "0,2,4,6,8";
  std::string codecs_arg;
  double duration_s = 0.0;
  std::uint32_t flush_ms = 100;

  auto* compress = app.add_subcommand("compress", "Mask and compress a capture into .lmc");
  compress->add_option("input", input, "pcap or raw capture")->required();
  compress->add_option("output", output, "output container (.lmc)")->required();
  add_common(compress, opt, true);

  auto* decompress = app.add_subcommand("decompress", "Expand a .lmc container back to packets");
  decompress->add_option("input", input, "input container (.lmc)")->required();
  decompress->add_option("output", output, "output capture (.pcap or raw)")->required();
  add_common(decompress, opt, false);

  auto* analyze = app.add_subcommand("analyze", "Per-measurement error statistics");
  analyze->add_option("original", input, "original capture")->required();
  analyze->add_option("masked", masked_path, "masked capture (omit to mask at --bits)");
  analyze->add_option("-n,--bits", opt.bits, "Masked bits (used for masking and the bound)");
  add_common(analyze, opt, false);

  auto* sweep_cmd = app.add_subcommand("sweep", "(n x codec) matrix of size/time/error metrics");
  sweep_cmd->add_option("input", input, "pcap or raw capture")->required();
  sweep_cmd->add_option("--bits", bits_arg, "Masked-bit values, comma separated");
  sweep_cmd->add_option("--codecs", codecs_arg,
                        "Codec families, comma separated (default: all available)");
  add_common(sweep_cmd, opt, false);
  sweep_cmd->add_option("--frame-size", opt.frame_size, "Packets per compressed frame");
  sweep_cmd->add_option("--workers", opt.workers, "Codec worker threads");
  sweep_cmd->add_option("--level", opt.level, "Codec-native level");

  auto* bench = app.add_subcommand("bench", "Timing benchmark (3 runs, 1 and all workers)");
  bench->add_option("input", input, "pcap or raw capture (>= 1 s of sensor time)")->required();
  bench->add_option("-n,--bits", opt.bits, "Masked bits");
  bench->add_option("--codecs", codecs_arg,
                     "Codec families, comma separated (default: all available)");
  add_common(bench, opt, false);
  bench->add_option("--frame-size", opt.frame_size, "Packets per compressed frame");
  bench->add_option("--level", opt.level, "Codec-native level");

  auto* relay_send = app.add_subcommand("relay-send", "Real-time UDP compressing relay");
  relay_send->add_option("--listen", listen, "HOST:PORT for raw sensor datagrams")->required();
  relay_send->add_option("--dest", dest, "HOST:PORT to send compressed frames to")->required();
  add_common(relay_send, opt, true);
  relay_send->add_option("--flush-ms", flush_ms, "Max frame age before send (ms)");
  relay_send->add_option("--overflow", overflow, "block | drop-oldest");
  relay_send->add_option("--duration", duration_s, "Stop after this many seconds (0 = run until SIGINT)");

  auto* relay_recv = app.add_subcommand("relay-recv", "Receive and store a relayed stream");
  relay_recv->add_option("--listen", listen, "HOST:PORT to receive frames on")->required();
  relay_recv->add_option("output", output, "output capture (.pcap or raw)")->required();
  add_common(relay_recv, opt, false);
  relay_recv->add_option("--duration", duration_s, "Stop after this many seconds (0 = run until SIGINT)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (compress->parsed()) return cmd_compress(opt, input, output, err);
    if (decompress->parsed()) return cmd_decompress(opt, input, output, err);
    if (analyze->parsed()) return cmd_analyze(opt, input, masked_path, err);
    if (sweep_cmd->parsed()) {
      std::vector<unsigned> bits_list;
      for (const auto& item : split_list(bits_arg)) {
        char* end = nullptr;
        const long v = std::strtol(item.c_str(), &end, 10);
        if (end == item.c_str() || *end != 0 || v < 0 || v > 255) {
          throw ParameterError("bad --bits value \"" + item + "\"");
        }
        bits_list.push_back(static_cast<unsigned>(v));
      }
      return cmd_sweep(opt, input, bits_list, split_list(codecs_arg), err);
    }
    if (bench->parsed()) return cmd_bench(opt, input, split_list(codecs_arg), err);
    if (relay_send->parsed()) {
      return cmd_relay_send(opt, listen, dest, overflow, flush_ms, duration_s, err);
    }
    if (relay_recv->parsed()) return cmd_relay_recv(opt, listen, output, duration_s, err);
    return 1;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const CapabilityError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace lmc::cli
