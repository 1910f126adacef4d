#include <gtest/gtest.h>

#include <fstream>
#include <string>
#include <vector>

#include "ipstat/record_io.hpp"
#include "support/property.hpp"
#include "support/temp_dir.hpp"

using namespace ipstat;
using ipstat::testing::TempDir;

namespace {

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string binary_file(std::uint32_t declared, const std::vector<std::uint32_t>& words) {
  std::string s = "IPR1";
  auto put = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  };
  put(declared);
  for (auto w : words) put(w);
  return s;
}

}  // namespace

TEST(RecordStream, TextTwoRecords) {
  TempDir dir;
  write_file(dir / "a.txt", "1.1.1.1\n2.2.2.2\n");
  const auto records = read_records(dir / "a.txt", RecordFormat::text);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0], (IpV4Address{1, 1, 1, 1}));
  EXPECT_EQ(records[1], (IpV4Address{2, 2, 2, 2}));
}

TEST(RecordStream, TextCrlfBlankLinesAndMissingFinalNewline) {
  TempDir dir;
  write_file(dir / "a.txt", "1.1.1.1\r\n\r\n   \n2.2.2.2 tail x\r\n\n3.3.3.3");
  RecordStream stream(dir / "a.txt", RecordFormat::text);
  std::vector<IpV4Address> got;
  stream.for_each([&](IpV4Address a) { got.push_back(a); });
  EXPECT_EQ(got, (std::vector<IpV4Address>{{1, 1, 1, 1}, {2, 2, 2, 2}, {3, 3, 3, 3}}));
  EXPECT_EQ(stream.records_read(), 3u);
}

TEST(RecordStream, StrictModeReportsLineNumber) {
  TempDir dir;
  write_file(dir / "a.txt", "1.1.1\n");
  try {
    read_records(dir / "a.txt", RecordFormat::text);
    FAIL() << "expected MalformedAddress";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedAddress);
    ASSERT_TRUE(e.line().has_value());
    EXPECT_EQ(*e.line(), 1u);
  }

  write_file(dir / "b.txt", "1.1.1.1\n\n9.9.9.999\n");
  try {
    read_records(dir / "b.txt", RecordFormat::text);
    FAIL() << "expected OctetOutOfRange";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OctetOutOfRange);
    EXPECT_EQ(e.line().value_or(0), 3u);
  }
}

TEST(RecordStream, LenientModeSkipsAndCounts) {
  TempDir dir;
  write_file(dir / "a.txt", "1.1.1\n2.2.2.2\nbogus\n300.1.1.1\n3.3.3.3\n");
  RecordStream stream(dir / "a.txt", RecordFormat::text, /*lenient=*/true);
  std::vector<IpV4Address> got;
  stream.for_each([&](IpV4Address a) { got.push_back(a); });
  EXPECT_EQ(got.size(), 2u);
  EXPECT_EQ(stream.skipped(), 3u);
}

TEST(RecordStream, VeryLongLineGrowsBuffer) {
  TempDir dir;
  std::string body = "4.4.4.4 " + std::string(3 << 20, 'x') + "\n5.5.5.5\n";
  write_file(dir / "a.txt", body);
  const auto records = read_records(dir / "a.txt", RecordFormat::text);
  EXPECT_EQ(records, (std::vector<IpV4Address>{{4, 4, 4, 4}, {5, 5, 5, 5}}));
}

TEST(RecordStream, BinaryThreeRecords) {
  TempDir dir;
  write_file(dir / "a.bin", binary_file(3, {0x01020304, 0x0A000001, 0xFFFFFFFF}));
  EXPECT_EQ(detect_format(dir / "a.bin"), RecordFormat::binary);
  const auto records = read_records(dir / "a.bin", RecordFormat::binary);
  EXPECT_EQ(records, (std::vector<IpV4Address>{{1, 2, 3, 4}, {10, 0, 0, 1}, {255, 255, 255, 255}}));
}

TEST(RecordStream, BinaryHeaderBytesAreExact) {
  TempDir dir;
  write_records(dir / "a.bin", RecordFormat::binary,
                std::vector<IpV4Address>{{1, 2, 3, 4}, {192, 168, 0, 1}});
  std::ifstream in(dir / "a.bin", std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(bytes, binary_file(2, {0x01020304, 0xC0A80001}));
}

TEST(RecordStream, BinaryErrors) {
  TempDir dir;
  write_file(dir / "short.bin", binary_file(3, {1, 2}));
  EXPECT_THROW(read_records(dir / "short.bin", RecordFormat::binary), Error);
  write_file(dir / "long.bin", binary_file(1, {1, 2}));
  EXPECT_THROW(read_records(dir / "long.bin", RecordFormat::binary), Error);
  write_file(dir / "magic.bin", "XXXX\0\0\0\0");
  EXPECT_THROW(read_records(dir / "magic.bin", RecordFormat::binary), Error);
  EXPECT_EQ(detect_format(dir / "magic.bin"), RecordFormat::text);
}

TEST(RecordStream, MissingFileIsIoError) {
  try {
    RecordStream stream("/nonexistent/ipstat/file.txt", RecordFormat::text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}

TEST(RecordSources, FileSourceReplaysAndCountsPasses) {
  TempDir dir;
  write_records(dir / "a.txt", RecordFormat::text, std::vector<IpV4Address>{{1, 1, 1, 1}, {2, 2, 2, 2}});
  FileSource source(dir / "a.txt");
  std::size_t seen = 0;
  source.for_each([&](IpV4Address) { ++seen; });
  source.for_each([&](IpV4Address) { ++seen; });
  EXPECT_EQ(seen, 4u);
  EXPECT_EQ(source.passes(), 2u);
  EXPECT_EQ(source.last_records(), 2u);
}

TEST(RecordSources, OneShotSourceRefusesReplay) {
  TempDir dir;
  write_records(dir / "a.txt", RecordFormat::text, std::vector<IpV4Address>{{1, 1, 1, 1}});
  OneShotSource source(RecordStream(dir / "a.txt", RecordFormat::text));
  EXPECT_FALSE(source.replayable());
  source.for_each([](IpV4Address) {});
  try {
    source.for_each([](IpV4Address) {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SourceNotReplayable);
  }
}

TEST(RecordSources, FirstOctetsPresentAscending) {
  const std::vector<IpV4Address> records{{9, 0, 0, 1}, {7, 1, 1, 1}, {9, 2, 2, 2}, {200, 0, 0, 0}};
  MemorySource source(records);
  EXPECT_EQ(first_octets_present(source), (std::vector<std::uint8_t>{7, 9, 200}));
}

TEST(RecordIoProperties, WriteReadRoundTripBothFormats) {
  TempDir dir;
  auto result = ipstat::testing::for_all(200, 3, [&](ipstat::testing::Rng& rng) -> std::optional<std::string> {
    const auto records = ipstat::testing::random_records(
        rng, {static_cast<std::size_t>(ipstat::testing::uniform(rng, 0, 300)), 50, 256, false});
    for (const auto fmt : {RecordFormat::text, RecordFormat::binary}) {
      const auto path = dir / "rt.dat";
      write_records(path, fmt, records);
      if (detect_format(path) != fmt) return std::string("detect ") + to_string(fmt);
      if (read_records(path, fmt) != records) return std::string("mismatch ") + to_string(fmt);
    }
    return std::nullopt;
  });
  EXPECT_TRUE(result) << *result.failure;
}
