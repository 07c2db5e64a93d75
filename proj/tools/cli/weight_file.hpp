#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlcw/half_word.hpp"

namespace mlcw::cli {

enum class WeightFormat { F16Le, F32Le };

/// Throws ParseError for anything but "f16le" / "f32le".
WeightFormat parse_weight_format(std::string_view name);

/// Optional sidecar describing a weight file, "key: value" per line.
/// Unknown keys are ignored.
struct WeightManifest {
  std::string name;
  std::optional<std::uint64_t> count;
  std::vector<std::uint64_t> shape;
};

WeightManifest parse_manifest(std::string_view text);

/// Decodes a flat little-endian payload. f32 values are rounded to binary16
/// (RangeError if one overflows). Throws ParseError if the length is not a
/// multiple of the element width.
std::vector<HalfWord> decode_weights(std::span<const std::uint8_t> bytes, WeightFormat format);

/// Reads `path`, and `manifest` (or `<path>.manifest` when present) to check
/// the element count.
std::vector<HalfWord> load_weights(const std::filesystem::path& path, WeightFormat format,
                                   const std::optional<std::filesystem::path>& manifest = {});

std::vector<std::uint8_t> encode_f16le(std::span<const HalfWord> words);

}  // namespace mlcw::cli
