#include "mlcw/buffer_format.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "mlcw/errors.hpp"

namespace mlcw {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'M', 'L', 'C', 'W'};
constexpr std::size_t kHeaderSize = 4 + 1 + 1 + 4;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFFU));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFFU));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b) {
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

std::vector<std::uint8_t> serialize_buffer(const EncodedBuffer& buffer) {
  if (buffer.count() > std::numeric_limits<std::uint32_t>::max()) {
    throw DomainError("buffer too large for the MLCW format");
  }
  if (!buffer.sign_duplicated && !buffer.is_unprotected()) {
    throw DomainError("buffers without sign duplication must be unprotected to be serialized");
  }
  if (!is_valid_granularity(buffer.granularity)) {
    throw DomainError("invalid granularity in buffer");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + buffer.group_count() + 2 * buffer.count());
  for (std::uint8_t b : kMagic) out.push_back(b);
  out.push_back(kBufferFormatVersion);
  out.push_back(static_cast<std::uint8_t>(buffer.granularity));
  put_u32(out, static_cast<std::uint32_t>(buffer.count()));
  for (Scheme s : buffer.schemes) {
    out.push_back(buffer.sign_duplicated ? static_cast<std::uint8_t>(s) : kRawGroupTag);
  }
  for (HalfWord w : buffer.words) put_u16(out, w.bits);
  return out;
}

EncodedBuffer parse_buffer(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) throw ParseError("buffer file truncated (header)");
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw ParseError("bad magic: not an MLCW buffer");
  }
  if (bytes[4] != kBufferFormatVersion) {
    throw ParseError("unsupported MLCW version " + std::to_string(bytes[4]));
  }
  EncodedBuffer buf;
  buf.granularity = bytes[5];
  if (!is_valid_granularity(buf.granularity)) {
    throw ParseError("invalid granularity " + std::to_string(buf.granularity));
  }
  const std::size_t count = get_u32(bytes.subspan(6, 4));
  const auto g = static_cast<std::size_t>(buf.granularity);
  const std::size_t groups = (count + g - 1) / g;
  const std::size_t expected = kHeaderSize + groups + 2 * count;
  if (bytes.size() != expected) {
    throw ParseError("buffer file size " + std::to_string(bytes.size()) + " != expected " +
                     std::to_string(expected));
  }

  const auto meta = bytes.subspan(kHeaderSize, groups);
  std::size_t raw_tags = 0;
  buf.schemes.reserve(groups);
  for (std::uint8_t tag : meta) {
    if (tag == kRawGroupTag) {
      ++raw_tags;
      buf.schemes.push_back(Scheme::NoChange);
    } else if (tag <= static_cast<std::uint8_t>(Scheme::Round)) {
      buf.schemes.push_back(static_cast<Scheme>(tag));
    } else {
      throw ParseError("invalid metadata symbol " + std::to_string(tag));
    }
  }
  if (raw_tags != 0 && raw_tags != groups) {
    throw ParseError("mixed raw and encoded groups");
  }
  buf.sign_duplicated = groups == 0 || raw_tags == 0;

  const auto payload = bytes.subspan(kHeaderSize + groups);
  buf.words.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    buf.words[i] = HalfWord{static_cast<std::uint16_t>(payload[2 * i] |
                                                       (payload[2 * i + 1] << 8))};
  }
  return buf;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_buffer_file(const std::filesystem::path& path, const EncodedBuffer& buffer) {
  const auto bytes = serialize_buffer(buffer);
  write_file_bytes(path, bytes);
}

EncodedBuffer read_buffer_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_buffer(bytes);
}

}  // namespace mlcw
