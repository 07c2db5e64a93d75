#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mlcw/codec.hpp"

namespace mlcw {

/// On-disk encoded buffer, all integers little-endian:
///
///   "MLCW" | version u8 (1) | granularity u8 | count u32
///   | one metadata byte per group (0 NoChange, 1 Rotate, 2 Round, 0xFF raw)
///   | count stored words as u16
///
/// 0xFF marks the unprotected system; a file uses it for every group or none.
inline constexpr std::uint8_t kBufferFormatVersion = 1;
inline constexpr std::uint8_t kRawGroupTag = 0xFF;

/// Throws DomainError for buffers the format cannot express (ablation
/// encodings with schemes but no sign copy, counts above 2^32-1).
std::vector<std::uint8_t> serialize_buffer(const EncodedBuffer& buffer);

/// Throws ParseError on any structural defect.
EncodedBuffer parse_buffer(std::span<const std::uint8_t> bytes);

void write_buffer_file(const std::filesystem::path& path, const EncodedBuffer& buffer);
EncodedBuffer read_buffer_file(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace mlcw
