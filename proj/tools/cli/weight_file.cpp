#include "cli/weight_file.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mlcw/buffer_format.hpp"
#include "mlcw/errors.hpp"

namespace mlcw::cli {

WeightFormat parse_weight_format(std::string_view name) {
  if (name == "f16le") return WeightFormat::F16Le;
  if (name == "f32le") return WeightFormat::F32Le;
  throw ParseError("unknown weight format '" + std::string(name) + "' (want f16le or f32le)");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::uint64_t parse_u64(std::string_view text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError("manifest: bad integer '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

WeightManifest parse_manifest(std::string_view text) {
  WeightManifest m;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError("manifest: expected key: value");
    const std::string_view key = trim(line.substr(0, colon));
    const std::string_view value = trim(line.substr(colon + 1));
    if (key == "name") {
      m.name = std::string(value);
    } else if (key == "count") {
      m.count = parse_u64(value);
    } else if (key == "shape") {
      std::string_view rest = value;
      while (!rest.empty()) {
        const auto sep = rest.find_first_of(",x ");
        const std::string_view dim = trim(rest.substr(0, sep));
        if (!dim.empty()) m.shape.push_back(parse_u64(dim));
        rest = sep == std::string_view::npos ? std::string_view{} : rest.substr(sep + 1);
      }
    }
  }
  if (m.count && !m.shape.empty()) {
    std::uint64_t product = 1;
    for (auto d : m.shape) product *= d;
    if (product != *m.count) throw ParseError("manifest: shape does not match count");
  }
  return m;
}

std::vector<HalfWord> decode_weights(std::span<const std::uint8_t> bytes, WeightFormat format) {
  const std::size_t width = format == WeightFormat::F16Le ? 2 : 4;
  if (bytes.size() % width != 0) {
    throw ParseError("weight file length " + std::to_string(bytes.size()) +
                     " is not a multiple of " + std::to_string(width));
  }
  std::vector<HalfWord> out(bytes.size() / width);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto* p = bytes.data() + i * width;
    if (format == WeightFormat::F16Le) {
      out[i] = HalfWord{static_cast<std::uint16_t>(p[0] | (p[1] << 8))};
    } else {
      const std::uint32_t raw = static_cast<std::uint32_t>(p[0]) |
                                (static_cast<std::uint32_t>(p[1]) << 8) |
                                (static_cast<std::uint32_t>(p[2]) << 16) |
                                (static_cast<std::uint32_t>(p[3]) << 24);
      out[i] = real_to_half(static_cast<double>(std::bit_cast<float>(raw)));
    }
  }
  return out;
}

std::vector<HalfWord> load_weights(const std::filesystem::path& path, WeightFormat format,
                                   const std::optional<std::filesystem::path>& manifest) {
  const auto words = decode_weights(read_file_bytes(path), format);
  std::filesystem::path sidecar = manifest.value_or(path.string() + ".manifest");
  if (manifest || std::filesystem::exists(sidecar)) {
    std::ifstream in(sidecar);
    if (!in) throw IoError("cannot open manifest " + sidecar.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const WeightManifest m = parse_manifest(ss.str());
    if (m.count && *m.count != words.size()) {
      throw ParseError("manifest count " + std::to_string(*m.count) + " != payload count " +
                       std::to_string(words.size()));
    }
  }
  return words;
}

std::vector<std::uint8_t> encode_f16le(std::span<const HalfWord> words) {
  std::vector<std::uint8_t> out;
  out.reserve(words.size() * 2);
  for (HalfWord w : words) {
    out.push_back(static_cast<std::uint8_t>(w.bits & 0xFFU));
    out.push_back(static_cast<std::uint8_t>(w.bits >> 8));
  }
  return out;
}

}  // namespace mlcw::cli
