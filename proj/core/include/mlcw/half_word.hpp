#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace mlcw {

/// Content of one 2-bit MLC cell. The enumerator value is the two-bit pattern
/// read most significant bit first.
enum class CellPattern : std::uint8_t { P00 = 0, P01 = 1, P10 = 2, P11 = 3 };

/// "00" and "11" program in a single step and are modeled as immune to soft
/// errors; "01" and "10" are the two-step intermediate states.
constexpr bool is_stable(CellPattern p) noexcept {
  return p == CellPattern::P00 || p == CellPattern::P11;
}

std::string_view to_string(CellPattern p) noexcept;

/// A 16-bit IEEE-754 binary16 word.
///
/// Bits are addressed by *position* counted from the most significant end:
/// position 0 is the sign, 1..5 the exponent, 6..15 the mantissa. The word is
/// stored in an MLC buffer as eight cells, cell k holding positions 2k and
/// 2k+1.
struct HalfWord {
  std::uint16_t bits = 0;

  static constexpr int kBits = 16;
  static constexpr int kCells = 8;

  constexpr HalfWord() = default;
  constexpr explicit HalfWord(std::uint16_t raw) : bits(raw) {}

  constexpr bool bit(int position) const noexcept {
    return ((bits >> (15 - position)) & 1U) != 0;
  }
  constexpr HalfWord with_bit(int position, bool value) const noexcept {
    const auto mask = static_cast<std::uint16_t>(1U << (15 - position));
    return HalfWord{static_cast<std::uint16_t>(value ? (bits | mask) : (bits & ~mask))};
  }
  constexpr CellPattern cell(int k) const noexcept {
    return static_cast<CellPattern>((bits >> (14 - 2 * k)) & 0x3U);
  }

  constexpr bool sign() const noexcept { return bit(0); }
  constexpr unsigned exponent_field() const noexcept { return (bits >> 10) & 0x1FU; }
  constexpr unsigned mantissa_field() const noexcept { return bits & 0x3FFU; }

  constexpr bool is_finite() const noexcept { return exponent_field() != 0x1FU; }
  constexpr bool is_nan() const noexcept {
    return exponent_field() == 0x1FU && mantissa_field() != 0;
  }
  constexpr bool is_inf() const noexcept {
    return exponent_field() == 0x1FU && mantissa_field() == 0;
  }

  /// True when the exponent MSB (position 1) is clear, which holds for every
  /// finite value of magnitude below 2 and is the precondition for storing a
  /// sign copy there.
  constexpr bool spare_bit_free() const noexcept { return !bit(1); }

  friend constexpr bool operator==(HalfWord, HalfWord) = default;
};

/// Nearest binary16 value, ties to even. Subnormals are produced exactly.
/// Throws RangeError for non-finite input or when the result would overflow
/// to infinity.
HalfWord real_to_half(double x);

/// Exact value of the word. NaN words yield a quiet NaN, infinities yield
/// +-infinity; check HalfWord::is_nan to tell them apart from real values.
double half_to_real(HalfWord h) noexcept;

/// The eight cells, most significant pair first.
std::array<CellPattern, HalfWord::kCells> cells(HalfWord h) noexcept;

/// Inverse of cells().
HalfWord from_cells(const std::array<CellPattern, HalfWord::kCells>& c) noexcept;

/// Renders a word as space-separated bit pairs, e.g. "00 01 11 00 01 01 00 11".
std::string to_pairs(HalfWord h);

/// Parses the to_pairs() form; whitespace between digits is ignored.
/// Throws ParseError unless exactly 16 binary digits are present.
HalfWord from_pairs(std::string_view text);

}  // namespace mlcw
