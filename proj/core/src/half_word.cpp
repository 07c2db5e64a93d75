#include "mlcw/half_word.hpp"

#include <cmath>
#include <limits>

#include "mlcw/errors.hpp"

namespace mlcw {

std::string_view to_string(CellPattern p) noexcept {
  switch (p) {
    case CellPattern::P00: return "00";
    case CellPattern::P01: return "01";
    case CellPattern::P10: return "10";
    case CellPattern::P11: return "11";
  }
  return "??";
}

namespace {

// Round a non-negative double to an integer, ties to even, independent of
// the floating-point environment's rounding mode.
double round_half_even(double s) {
  const double floor_s = std::floor(s);
  const double frac = s - floor_s;  // exact for the magnitudes used here
  if (frac > 0.5) return floor_s + 1.0;
  if (frac < 0.5) return floor_s;
  return std::fmod(floor_s, 2.0) == 0.0 ? floor_s : floor_s + 1.0;
}

constexpr int kExponentBias = 15;
constexpr int kMantissaBits = 10;
constexpr int kMinNormalExponent = 1 - kExponentBias;  // -14

}  // namespace

HalfWord real_to_half(double x) {
  if (!std::isfinite(x)) {
    throw RangeError("real_to_half: input is not finite");
  }
  const bool negative = std::signbit(x);
  const double mag = std::fabs(x);

  // Binary exponent e with mag = m * 2^e, m in [1, 2).
  int e = 0;
  if (mag != 0.0) {
    (void)std::frexp(mag, &e);
    e -= 1;
  }

  // Scale so that the integer part is the (implicit-bit inclusive) significand.
  // The encoding is monotone in the scaled integer: a carry out of the
  // mantissa propagates into the exponent field, and a subnormal that rounds
  // up to 2^10 becomes the smallest normal.
  std::uint32_t magnitude_bits = 0;
  if (mag == 0.0 || e < kMinNormalExponent) {
    const double scaled = std::ldexp(mag, -kMinNormalExponent + kMantissaBits);  // * 2^24
    magnitude_bits = static_cast<std::uint32_t>(round_half_even(scaled));
  } else {
    const double scaled = std::ldexp(mag, kMantissaBits - e);  // in [1024, 2048)
    const auto significand = static_cast<std::uint32_t>(round_half_even(scaled));
    magnitude_bits = (static_cast<std::uint32_t>(e + kExponentBias) << kMantissaBits) +
                     (significand - (1U << kMantissaBits));
  }
  if (magnitude_bits >= 0x7C00U) {
    throw RangeError("real_to_half: value overflows binary16");
  }
  return HalfWord{static_cast<std::uint16_t>((negative ? 0x8000U : 0U) | magnitude_bits)};
}

double half_to_real(HalfWord h) noexcept {
  const unsigned exp = h.exponent_field();
  const unsigned man = h.mantissa_field();
  double mag = 0.0;
  if (exp == 0x1FU) {
    mag = man == 0 ? std::numeric_limits<double>::infinity()
                   : std::numeric_limits<double>::quiet_NaN();
  } else if (exp == 0) {
    mag = std::ldexp(static_cast<double>(man), kMinNormalExponent - kMantissaBits);
  } else {
    mag = std::ldexp(static_cast<double>(man | (1U << kMantissaBits)),
                     static_cast<int>(exp) - kExponentBias - kMantissaBits);
  }
  return h.sign() ? -mag : mag;
}

std::array<CellPattern, HalfWord::kCells> cells(HalfWord h) noexcept {
  std::array<CellPattern, HalfWord::kCells> out{};
  for (int k = 0; k < HalfWord::kCells; ++k) out[k] = h.cell(k);
  return out;
}

HalfWord from_cells(const std::array<CellPattern, HalfWord::kCells>& c) noexcept {
  std::uint16_t bits = 0;
  for (int k = 0; k < HalfWord::kCells; ++k) {
    bits = static_cast<std::uint16_t>((bits << 2) | static_cast<unsigned>(c[k]));
  }
  return HalfWord{bits};
}

std::string to_pairs(HalfWord h) {
  std::string out;
  out.reserve(23);
  for (int pos = 0; pos < HalfWord::kBits; ++pos) {
    if (pos > 0 && pos % 2 == 0) out.push_back(' ');
    out.push_back(h.bit(pos) ? '1' : '0');
  }
  return out;
}

HalfWord from_pairs(std::string_view text) {
  std::uint32_t bits = 0;
  int digits = 0;
  for (char ch : text) {
    if (ch == ' ' || ch == '\t' || ch == '_') continue;
    if (ch != '0' && ch != '1') {
      throw ParseError("from_pairs: unexpected character in bit string");
    }
    bits = (bits << 1) | static_cast<std::uint32_t>(ch - '0');
    ++digits;
  }
  if (digits != HalfWord::kBits) {
    throw ParseError("from_pairs: expected 16 binary digits");
  }
  return HalfWord{static_cast<std::uint16_t>(bits)};
}

}  // namespace mlcw
