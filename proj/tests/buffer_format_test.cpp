#include "mlcw/buffer_format.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "mlcw/errors.hpp"

namespace mlcw {
namespace {

std::vector<HalfWord> worked_examples() {
  return {from_pairs("00 01 11 00 01 01 00 11"), from_pairs("00 10 01 01 01 00 01 11"),
          from_pairs("00 01 00 00 00 01 01 01")};
}

TEST(BufferFormatTest, BitExactLayout) {
  const EncodedBuffer buf = encode_buffer(worked_examples(), 1, SchemeSet::hybrid());
  const auto bytes = serialize_buffer(buf);
  const std::vector<std::uint8_t> expected = {
      'M', 'L', 'C', 'W', 0x01, 0x01, 0x03, 0x00, 0x00, 0x00,  // header
      0x00, 0x01, 0x02,                                        // metadata
      0x53, 0x1C,                                              // 0001 1100 0101 0011
      0xA3, 0x32,                                              // 0011 0010 1010 0011
      0x13, 0x10,                                              // 0001 0000 0001 0011
  };
  EXPECT_EQ(bytes, expected);
}

TEST(BufferFormatTest, UnprotectedUsesRawTag) {
  const EncodedBuffer buf = encode_buffer(worked_examples(), 2, SchemeSet::unprotected());
  const auto bytes = serialize_buffer(buf);
  ASSERT_EQ(bytes.size(), 10U + 2U + 6U);
  EXPECT_EQ(bytes[10], kRawGroupTag);
  EXPECT_EQ(bytes[11], kRawGroupTag);
  const EncodedBuffer back = parse_buffer(bytes);
  EXPECT_FALSE(back.sign_duplicated);
  EXPECT_EQ(back, buf);
}

TEST(BufferFormatTest, RoundTripProperty) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<HalfWord> w(rng() % 300);
    for (auto& h : w) h = HalfWord{static_cast<std::uint16_t>(rng() & 0xBFFFU)};
    const int g = kGranularities[rng() % kGranularities.size()];
    const SchemeSet set = trial % 5 == 0 ? SchemeSet::unprotected() : SchemeSet::hybrid();
    const EncodedBuffer buf = encode_buffer(w, g, set);
    const auto bytes = serialize_buffer(buf);
    ASSERT_EQ(parse_buffer(bytes), buf);
    ASSERT_EQ(serialize_buffer(parse_buffer(bytes)), bytes);
  }
}

TEST(BufferFormatTest, RejectsMalformedInput) {
  const auto good = serialize_buffer(encode_buffer(worked_examples(), 1, SchemeSet::hybrid()));

  auto bad = good;
  bad[0] = 'X';
  EXPECT_THROW(parse_buffer(bad), ParseError);

  bad = good;
  bad[4] = 2;
  EXPECT_THROW(parse_buffer(bad), ParseError);

  bad = good;
  bad[5] = 3;
  EXPECT_THROW(parse_buffer(bad), ParseError);

  bad = good;
  bad.pop_back();
  EXPECT_THROW(parse_buffer(bad), ParseError);

  bad = good;
  bad.push_back(0);
  EXPECT_THROW(parse_buffer(bad), ParseError);

  bad = good;
  bad[11] = 3;
  EXPECT_THROW(parse_buffer(bad), ParseError);

  bad = good;
  bad[11] = kRawGroupTag;  // mixed raw and encoded
  EXPECT_THROW(parse_buffer(bad), ParseError);

  EXPECT_THROW(parse_buffer(std::vector<std::uint8_t>{'M', 'L'}), ParseError);
}

TEST(BufferFormatTest, AblationBufferIsNotSerializable) {
  EncodeOptions options;
  options.duplicate_sign = false;
  const EncodedBuffer buf = encode_buffer(worked_examples(), options);
  ASSERT_FALSE(buf.is_unprotected());  // row 2 picks Rotate
  EXPECT_THROW(serialize_buffer(buf), DomainError);
}

TEST(BufferFormatTest, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "mlcw_buffer_format_test.mlcw";
  const EncodedBuffer buf = encode_buffer(worked_examples(), 4, SchemeSet::hybrid());
  write_buffer_file(path, buf);
  EXPECT_EQ(read_buffer_file(path), buf);
  std::filesystem::remove(path);
  EXPECT_THROW(read_buffer_file(path), IoError);
}

}  // namespace
}  // namespace mlcw
