#include "mlcw/codec.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <string>

#include "mlcw/errors.hpp"
#include "mlcw/parallel.hpp"

namespace mlcw {

std::string_view to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::NoChange: return "nochange";
    case Scheme::Rotate: return "rotate";
    case Scheme::Round: return "round";
  }
  return "?";
}

std::optional<Scheme> scheme_from_string(std::string_view name) noexcept {
  for (Scheme s : kAllSchemes) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

SchemeSet parse_scheme_set(std::string_view text) {
  std::string lowered;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) {
      lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  if (lowered == "unprotected" || lowered == "none") return SchemeSet::unprotected();
  if (lowered == "hybrid" || lowered == "all") return SchemeSet::hybrid();

  SchemeSet set{Scheme::NoChange};
  std::string_view rest = lowered;
  while (true) {
    const std::size_t comma = rest.find(',');
    const std::string_view token = rest.substr(0, comma);
    const auto scheme = scheme_from_string(token);
    if (!scheme) throw ParseError("unknown scheme '" + std::string(token) + "'");
    set = set.with(*scheme);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return set;
}

std::string to_string(SchemeSet set) {
  if (set.is_unprotected()) return "unprotected";
  if (set == SchemeSet::hybrid()) return "hybrid";
  std::string out;
  for (Scheme s : kAllSchemes) {
    if (!set.contains(s)) continue;
    if (!out.empty()) out.push_back(',');
    out += to_string(s);
  }
  return out;
}

bool is_valid_granularity(int g) noexcept {
  return std::find(kGranularities.begin(), kGranularities.end(), g) != kGranularities.end();
}

HalfWord duplicate_sign(HalfWord h) {
  if (!h.spare_bit_free()) {
    throw DomainError("duplicate_sign: exponent MSB in use (|w| >= 2, Inf or NaN): " +
                      to_pairs(h));
  }
  return h.with_bit(1, h.bit(0));
}

StrippedWord strip_sign_duplicate(HalfWord h) noexcept {
  StrippedWord out;
  out.sign = h.bit(0);
  out.mismatch = h.bit(0) != h.bit(1);
  out.word = h.with_bit(1, false);
  return out;
}

namespace {
constexpr std::uint16_t kSignPair = 0xC000;
constexpr std::uint16_t kPayload = 0x3FFF;  // positions 2..15
}  // namespace

HalfWord rotate_payload_right(HalfWord h) noexcept {
  const std::uint16_t payload = h.bits & kPayload;
  const auto rotated =
      static_cast<std::uint16_t>(((payload >> 1) | ((payload & 1U) << 13)) & kPayload);
  return HalfWord{static_cast<std::uint16_t>((h.bits & kSignPair) | rotated)};
}

HalfWord rotate_payload_left(HalfWord h) noexcept {
  const std::uint16_t payload = h.bits & kPayload;
  const auto rotated =
      static_cast<std::uint16_t>(((payload << 1) | (payload >> 13)) & kPayload);
  return HalfWord{static_cast<std::uint16_t>((h.bits & kSignPair) | rotated)};
}

std::uint8_t round_nibble(std::uint8_t nibble) noexcept {
  static constexpr std::array<std::uint8_t, 4> kFriendly = {0b0000, 0b0011, 0b1100, 0b1111};
  return kFriendly[(nibble >> 2) & 0x3U];
}

HalfWord round_tail(HalfWord h) noexcept {
  const auto nibble = static_cast<std::uint8_t>(h.bits & 0xFU);
  return HalfWord{static_cast<std::uint16_t>((h.bits & 0xFFF0U) | round_nibble(nibble))};
}

int stable_count(HalfWord h) noexcept {
  int n = 0;
  for (int k = 0; k < HalfWord::kCells; ++k) n += is_stable(h.cell(k)) ? 1 : 0;
  return n;
}

namespace {

HalfWord reform(HalfWord h, Scheme s) noexcept {
  switch (s) {
    case Scheme::NoChange: return h;
    case Scheme::Rotate: return rotate_payload_right(h);
    case Scheme::Round: return round_tail(h);
  }
  return h;
}

HalfWord unreform(HalfWord stored, Scheme s) noexcept {
  return s == Scheme::Rotate ? rotate_payload_left(stored) : stored;
}

HalfWord stored_form(HalfWord h, Scheme s, bool duplicate) {
  if (!h.spare_bit_free()) {
    throw DomainError("weight out of normalized range (exponent MSB set): " + to_pairs(h));
  }
  return reform(duplicate ? duplicate_sign(h) : h, s);
}

Scheme select_scheme_impl(std::span<const HalfWord> group, SchemeSet enabled, bool duplicate) {
  std::array<int, 3> score{};
  for (HalfWord w : group) {
    for (Scheme s : kAllSchemes) {
      score[static_cast<std::size_t>(s)] += stable_count(stored_form(w, s, duplicate));
    }
  }
  Scheme best = Scheme::NoChange;
  // kAllSchemes is in preference order, so strict '>' keeps the earlier one on ties.
  for (Scheme s : kAllSchemes) {
    if (s != Scheme::NoChange && !enabled.contains(s)) continue;
    if (score[static_cast<std::size_t>(s)] > score[static_cast<std::size_t>(best)]) best = s;
  }
  return best;
}

}  // namespace

HalfWord apply_scheme(HalfWord h, Scheme s) { return stored_form(h, s, true); }

HalfWord unapply_scheme(HalfWord stored, Scheme s, bool* mismatch) noexcept {
  const StrippedWord stripped = strip_sign_duplicate(unreform(stored, s));
  if (mismatch != nullptr) *mismatch = stripped.mismatch;
  return stripped.word.with_bit(0, stripped.sign);
}

Scheme select_scheme(std::span<const HalfWord> group, SchemeSet enabled) {
  return select_scheme_impl(group, enabled, true);
}

EncodedGroupView EncodedBuffer::group(std::size_t i) const {
  const std::size_t begin = group_begin(i);
  const std::size_t end = std::min(words.size(), begin + static_cast<std::size_t>(granularity));
  return EncodedGroupView{schemes.at(i),
                          std::span<const HalfWord>(words).subspan(begin, end - begin)};
}

bool EncodedBuffer::is_unprotected() const noexcept {
  return !sign_duplicated &&
         std::all_of(schemes.begin(), schemes.end(),
                     [](Scheme s) { return s == Scheme::NoChange; });
}

namespace {
// Groups handled per parallel task; fixed so results never depend on workers.
constexpr std::size_t kGroupsPerChunk = 4096;
}  // namespace

EncodedBuffer encode_buffer(std::span<const HalfWord> weights, const EncodeOptions& options) {
  if (!is_valid_granularity(options.granularity)) {
    throw DomainError("granularity must be one of 1, 2, 4, 8, 16");
  }
  const bool unprotected = options.enabled.is_unprotected();
  EncodedBuffer buf;
  buf.granularity = options.granularity;
  buf.sign_duplicated = !unprotected && options.duplicate_sign;
  buf.words.resize(weights.size());
  const auto g = static_cast<std::size_t>(options.granularity);
  buf.schemes.assign((weights.size() + g - 1) / g, Scheme::NoChange);

  if (unprotected) {
    std::copy(weights.begin(), weights.end(), buf.words.begin());
    return buf;
  }

  for_each_chunk(buf.schemes.size(), kGroupsPerChunk, options.workers,
                 [&](std::size_t, std::size_t first, std::size_t last) {
                   for (std::size_t gi = first; gi < last; ++gi) {
                     const std::size_t begin = gi * g;
                     const auto group = weights.subspan(begin, std::min(g, weights.size() - begin));
                     const Scheme s = select_scheme_impl(group, options.enabled, buf.sign_duplicated);
                     buf.schemes[gi] = s;
                     for (std::size_t j = 0; j < group.size(); ++j) {
                       buf.words[begin + j] = stored_form(group[j], s, buf.sign_duplicated);
                     }
                   }
                 });
  return buf;
}

EncodedBuffer encode_buffer(std::span<const HalfWord> weights, int granularity,
                            SchemeSet enabled) {
  EncodeOptions options;
  options.granularity = granularity;
  options.enabled = enabled;
  return encode_buffer(weights, options);
}

std::vector<HalfWord> decode_buffer(const EncodedBuffer& buffer, DecodeStats* stats,
                                    unsigned workers) {
  std::vector<HalfWord> out(buffer.words.size());
  std::atomic<std::uint64_t> mismatches{0};
  for_each_chunk(buffer.schemes.size(), kGroupsPerChunk, workers,
                 [&](std::size_t, std::size_t first, std::size_t last) {
                   std::uint64_t local = 0;
                   for (std::size_t gi = first; gi < last; ++gi) {
                     const EncodedGroupView group = buffer.group(gi);
                     const std::size_t begin = buffer.group_begin(gi);
                     for (std::size_t j = 0; j < group.stored.size(); ++j) {
                       if (buffer.sign_duplicated) {
                         bool mismatch = false;
                         out[begin + j] = unapply_scheme(group.stored[j], group.scheme, &mismatch);
                         local += mismatch ? 1 : 0;
                       } else {
                         out[begin + j] = unreform(group.stored[j], group.scheme);
                       }
                     }
                   }
                   mismatches.fetch_add(local, std::memory_order_relaxed);
                 });
  if (stats != nullptr) stats->sign_mismatches += mismatches.load();
  return out;
}

double metadata_overhead(int granularity) {
  if (granularity < 1) throw DomainError("metadata_overhead: granularity must be >= 1");
  return 2.0 / (16.0 * static_cast<double>(granularity));
}

}  // namespace mlcw
