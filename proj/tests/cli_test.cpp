// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <gtest/gtest.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "lmc/capture.hpp"
#include "lmc/container.hpp"
#include "lmc/mask.hpp"
#include "lmc/relay.hpp"
#include "synth.hpp"

namespace lmc {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("lmc_cli_test_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()
                                            ->current_test_info()
                                            ->name());
    fs::create_directories(dir_);
  }
  void TearDown() override {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(std::initializer_list<std::string> args) {
    std::vector<std::string> strings{"lmc"};
    strings.insert(strings.end(), args);
    std::vector<const char*> argv;
    for (const auto& s : strings) argv.push_back(s.c_str());
    out_.str("");
    err_.str("");
    return cli::run(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  void write_file(const std::string& p, ByteSpan bytes) {
    std::ofstream f(p, std::ios::binary);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  }

  Bytes read_file(const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    EXPECT_TRUE(f.is_open()) << p;
    std::stringstream buf;
    buf << f.rdbuf();
    const std::string s = buf.str();
    return Bytes(s.begin(), s.end());
  }

  std::string make_pcap_input(std::size_t packets, std::uint32_t seed) {
    const Bytes stream = testutil::structured_stream(reference_layout(), packets, seed);
    testutil::PcapBuilder pcap;
    for (std::size_t i = 0; i < packets; ++i) {
      pcap.add_udp(2368, ByteSpan(stream.data() + i * 1206, 1206),
                   {1000 + i / 752, static_cast<std::uint32_t>((i % 752) * 1330000)});
    }
    const std::string p = path("input.pcap");
    write_file(p, pcap.bytes());
    return p;
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, CompressDecompressRoundTrip) {
  const std::string in = make_pcap_input(30, 5);
  const std::string lmc_path = path("out.lmc");
  const std::string back = path("back.pcap");

  ASSERT_EQ(run({"compress", "--bits", "4", "--codec", "lz4", in, lmc_path}), 0) << err_.str();
  ASSERT_EQ(run({"decompress", lmc_path, back}), 0) << err_.str();

  // Decompressed pcap payloads equal the masked originals.
  std::ifstream f(back, std::ios::binary);
  PcapReader reader(f);
  Bytes got;
  while (auto packet = reader.next()) {
    got.insert(got.end(), packet->payload.begin(), packet->payload.end());
  }
  Bytes expected;
  {
    std::ifstream orig(in, std::ios::binary);
    PcapReader orig_reader(orig);
    while (auto packet = orig_reader.next()) {
      expected.insert(expected.end(), packet->payload.begin(), packet->payload.end());
    }
  }
  apply_mask_batch(expected, PacketMask(reference_layout(), 4));
  EXPECT_EQ(got, expected);
}

TEST_F(CliTest, RawInputAutoDetected) {
  const Bytes stream = testutil::structured_stream(reference_layout(), 10, 6);
  const std::string in = path("input.bin");
  write_file(in, stream);
  const std::string lmc_path = path("out.lmc");
  const std::string back = path("back.bin");

  ASSERT_EQ(run({"compress", "-n", "0", "--codec", "store", in, lmc_path}), 0) << err_.str();
  ASSERT_EQ(run({"decompress", lmc_path, back}), 0) << err_.str();
  EXPECT_EQ(read_file(back), stream);  // n = 0: lossless mode
}

TEST_F(CliTest, BitsOutOfRangeIsUsageError) {
  const std::string in = make_pcap_input(5, 7);
  EXPECT_EQ(run({"compress", "--bits", "16", in, path("out.lmc")}), 1);
  EXPECT_FALSE(fs::exists(path("out.lmc")));  // no partial output
}

TEST_F(CliTest, MissingInputFileIsUsageError) {
  EXPECT_EQ(run({"compress", path("nope.pcap"), path("out.lmc")}), 1);
}

TEST_F(CliTest, UnknownFlagIsUsageError) {
  EXPECT_EQ(run({"compress", "--frobnicate", "x", "y"}), 1);
}

TEST_F(CliTest, HelpExitsZero) { EXPECT_EQ(run({"--help"}), 0); }

TEST_F(CliTest, CorruptContainerExitsDataError) {
  const std::string in = make_pcap_input(20, 8);
  const std::string lmc_path = path("out.lmc");
  ASSERT_EQ(run({"compress", "-n", "2", "--codec", "deflate", "--frame-size", "5", in, lmc_path}),
            0);

  Bytes container = read_file(lmc_path);
  container[container.size() / 2] ^= 0xFF;  // hits a frame payload
  write_file(lmc_path, container);

  EXPECT_EQ(run({"decompress", lmc_path, path("back.bin")}), 2);
  EXPECT_NE(err_.str().find("LOST FRAMES"), std::string::npos) << err_.str();
}

TEST_F(CliTest, SweepMatrixCsvRowCount) {
  const std::string in = make_pcap_input(20, 9);
  const std::string report = path("r.csv");
  ASSERT_EQ(run({"sweep", "--bits", "0,2,4,6,8", "--codecs", "store,deflate,lz4", in,
                 "--report", report}),
            0)
      << err_.str();

  std::ifstream f(report);
  std::string line;
  int rows = -1;  // header line does not count
  while (std::getline(f, line)) ++rows;
  EXPECT_EQ(rows, 15);  // 5 bits values x 3 codecs
}

TEST_F(CliTest, SweepJsonReport) {
  const std::string in = make_pcap_input(10, 10);
  const std::string report = path("r.json");
  ASSERT_EQ(run({"sweep", "--bits", "0,4", "--codecs", "lz4", in, "--report", report}), 0);
  const Bytes doc = read_file(report);
  EXPECT_NE(std::string(doc.begin(), doc.end()).find("\"rfs\""), std::string::npos);
}

TEST_F(CliTest, AnalyzeSingleInputMasksInMemory) {
  const std::string in = make_pcap_input(10, 11);
  const std::string report = path("a.json");
  ASSERT_EQ(run({"analyze", "-n", "4", in, "--report", report}), 0) << err_.str();
  const std::string text = err_.str();
  EXPECT_NE(text.find("mean error"), std::string::npos);
  EXPECT_NE(text.find("theoretical max"), std::string::npos);
  EXPECT_TRUE(fs::exists(report));
}

TEST_F(CliTest, AnalyzeTwoCaptures) {
  const std::string in = make_pcap_input(10, 12);
  const std::string lmc_path = path("out.lmc");
  const std::string masked = path("masked.pcap");
  ASSERT_EQ(run({"compress", "-n", "2", in, lmc_path}), 0);
  ASSERT_EQ(run({"decompress", lmc_path, masked}), 0);
  ASSERT_EQ(run({"analyze", "-n", "2", in, masked}), 0) << err_.str();
}

TEST_F(CliTest, BenchRefusesShortInput) {
  const std::string in = make_pcap_input(20, 13);  // well under 1 s
  EXPECT_EQ(run({"bench", in}), 1);
  EXPECT_NE(err_.str().find("1 s"), std::string::npos);
}

TEST_F(CliTest, BenchTwoWorkerSeries) {
  // 800 packets at 1.33 ms of sensor time each is just over one second.
  const Bytes stream = testutil::structured_stream(reference_layout(), 800, 14);
  const std::string in = path("input.bin");
  write_file(in, stream);
  const std::string report = path("bench.json");
  ASSERT_EQ(run({"bench", "-n", "4", "--codecs", "store,lz4", in, "--report", report}), 0)
      << err_.str();
  const std::string text = err_.str();
  EXPECT_NE(text.find("mask_us/packet"), std::string::npos);
  EXPECT_NE(text.find("store"), std::string::npos);
  EXPECT_TRUE(fs::exists(report));
}

TEST_F(CliTest, RelayPairOverLoopback) {
  const Bytes stream = testutil::structured_stream(reference_layout(), 50, 15);
  const std::string out_file = path("relayed.bin");

  std::thread receiver([&] {
    run({"relay-recv", "--listen", "127.0.0.1:37411", out_file, "--duration", "3.5"});
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(200));
  std::thread sender_thread([&] {
    std::ostringstream sink_out, sink_err;
    std::vector<std::string> args{"lmc",     "relay-send", "--listen", "127.0.0.1:37410",
                                  "--dest",  "127.0.0.1:37411", "-n", "4",
                                  "--codec", "lz4",        "--frame-size", "10",
                                  "--duration", "2.5"};
    std::vector<const char*> argv;
    for (const auto& s : args) argv.push_back(s.c_str());
    cli::run(static_cast<int>(argv.size()), argv.data(), sink_out, sink_err);
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(300));

  UdpChannel feeder({"127.0.0.1", 0}, Endpoint{"127.0.0.1", 37410});
  for (std::size_t i = 0; i < 50; ++i) {
    feeder.send(ByteSpan(stream.data() + i * 1206, 1206));
    if (i % 10 == 9) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  sender_thread.join();
  receiver.join();

  Bytes expected = stream;
  apply_mask_batch(expected, PacketMask(reference_layout(), 4));
  EXPECT_EQ(read_file(out_file), expected);
}

}  // namespace
}  // namespace lmc
