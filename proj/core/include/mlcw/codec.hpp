#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlcw/half_word.hpp"

namespace mlcw {

/// Per-group content reformation. The numeric value is the metadata symbol
/// written to the tri-level cell.
enum class Scheme : std::uint8_t { NoChange = 0, Rotate = 1, Round = 2 };

inline constexpr std::array<Scheme, 3> kAllSchemes = {Scheme::NoChange, Scheme::Rotate,
                                                      Scheme::Round};

std::string_view to_string(Scheme s) noexcept;
std::optional<Scheme> scheme_from_string(std::string_view name) noexcept;

/// Set of schemes an encoder may choose from. The empty set is the
/// "unprotected" system: no sign duplication, words stored raw.
class SchemeSet {
 public:
  constexpr SchemeSet() = default;
  constexpr SchemeSet(std::initializer_list<Scheme> schemes) {
    for (Scheme s : schemes) mask_ |= bit(s);
  }

  static constexpr SchemeSet unprotected() { return SchemeSet{}; }
  static constexpr SchemeSet hybrid() {
    return SchemeSet{Scheme::NoChange, Scheme::Rotate, Scheme::Round};
  }

  constexpr SchemeSet with(Scheme s) const noexcept {
    SchemeSet out = *this;
    out.mask_ |= bit(s);
    return out;
  }

  constexpr bool contains(Scheme s) const noexcept { return (mask_ & bit(s)) != 0; }
  constexpr bool empty() const noexcept { return mask_ == 0; }
  constexpr bool is_unprotected() const noexcept { return empty(); }

  friend constexpr bool operator==(SchemeSet, SchemeSet) = default;

 private:
  static constexpr std::uint8_t bit(Scheme s) {
    return static_cast<std::uint8_t>(1U << static_cast<unsigned>(s));
  }
  std::uint8_t mask_ = 0;
};

/// Parses "unprotected", "hybrid", or a comma list such as "nochange,rotate".
/// NoChange is added implicitly to any non-empty list. Throws ParseError.
SchemeSet parse_scheme_set(std::string_view text);
std::string to_string(SchemeSet set);

inline constexpr std::array<int, 5> kGranularities = {1, 2, 4, 8, 16};
bool is_valid_granularity(int g) noexcept;

// ---------------------------------------------------------------------------
// Single-word transforms

/// Copies the sign into position 1. The leading cell becomes "00" or "11".
/// Throws DomainError if position 1 is already set (|value| >= 2, Inf, NaN).
HalfWord duplicate_sign(HalfWord h);

struct StrippedWord {
  bool sign = false;
  HalfWord word;          // original word with position 1 cleared
  bool mismatch = false;  // positions 0 and 1 disagreed; position 0 was used
};

StrippedWord strip_sign_duplicate(HalfWord h) noexcept;

/// Rotates positions 2..15 right by one (position 15 wraps to 2). The sign
/// pair in cell 0 is left in place.
HalfWord rotate_payload_right(HalfWord h) noexcept;
HalfWord rotate_payload_left(HalfWord h) noexcept;

/// Maps the low nibble onto the nearest of the four cell-friendly nibbles:
/// 00xx -> 0000, 01xx -> 0011, 10xx -> 1100, 11xx -> 1111.
HalfWord round_tail(HalfWord h) noexcept;
std::uint8_t round_nibble(std::uint8_t nibble) noexcept;

/// Number of cells holding "00" or "11".
int stable_count(HalfWord h) noexcept;

HalfWord apply_scheme(HalfWord h, Scheme s);

/// Inverse of apply_scheme. Round is lossy: the rounded weight comes back.
/// `mismatch` (optional) is set when the sign pair disagreed.
HalfWord unapply_scheme(HalfWord stored, Scheme s, bool* mismatch = nullptr) noexcept;

/// Scheme with the largest total stable-cell count over the group, ties broken
/// NoChange > Rotate > Round. Only schemes in `enabled` are considered (NoChange
/// is always eligible). Throws DomainError if any word has position 1 set.
Scheme select_scheme(std::span<const HalfWord> group,
                     SchemeSet enabled = SchemeSet::hybrid());

// ---------------------------------------------------------------------------
// Buffers

/// One group of an encoded buffer.
struct EncodedGroupView {
  Scheme scheme;
  std::span<const HalfWord> stored;
};

/// Grouped, reformatted words plus one metadata symbol per group.
///
/// Words are held contiguously; group i covers [i*g, min((i+1)*g, count)).
/// When `sign_duplicated` is false every group is NoChange and words are the
/// raw inputs (the unprotected system), unless the buffer came from an
/// ablation encode with sign protection disabled.
struct EncodedBuffer {
  int granularity = 1;
  bool sign_duplicated = true;
  std::vector<Scheme> schemes;
  std::vector<HalfWord> words;

  std::size_t count() const noexcept { return words.size(); }
  std::size_t group_count() const noexcept { return schemes.size(); }
  EncodedGroupView group(std::size_t i) const;
  std::size_t group_begin(std::size_t i) const noexcept {
    return i * static_cast<std::size_t>(granularity);
  }

  /// True when the buffer is in the raw "unprotected" form representable by
  /// the 0xFF metadata symbol.
  bool is_unprotected() const noexcept;

  friend bool operator==(const EncodedBuffer&, const EncodedBuffer&) = default;
};

struct EncodeOptions {
  int granularity = 1;
  SchemeSet enabled = SchemeSet::hybrid();
  /// Ablation switch: keep scheme selection but skip the sign copy.
  bool duplicate_sign = true;
  /// Worker threads for per-group work; output does not depend on it.
  unsigned workers = 1;
};

/// Throws DomainError on an invalid granularity or an out-of-range weight.
EncodedBuffer encode_buffer(std::span<const HalfWord> weights, const EncodeOptions& options);
EncodedBuffer encode_buffer(std::span<const HalfWord> weights, int granularity,
                            SchemeSet enabled);

struct DecodeStats {
  std::uint64_t sign_mismatches = 0;

  DecodeStats& operator+=(const DecodeStats& o) noexcept {
    sign_mismatches += o.sign_mismatches;
    return *this;
  }
};

std::vector<HalfWord> decode_buffer(const EncodedBuffer& buffer, DecodeStats* stats = nullptr,
                                    unsigned workers = 1);

/// Metadata bits per weight bit: 2 / (16 * granularity).
double metadata_overhead(int granularity);

}  // namespace mlcw
