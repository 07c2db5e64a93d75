#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlcw/codec.hpp"
#include "mlcw/half_word.hpp"
#include "mlcw/mem_device.hpp"

namespace mlcw {

/// Cell-pattern counts for one storage system over a weight set.
struct PatternCensus {
  std::string system;
  CellHistogram counts{};

  std::uint64_t stable() const noexcept { return counts[0] + counts[3]; }
  std::uint64_t total() const noexcept { return counts[0] + counts[1] + counts[2] + counts[3]; }
};

/// Label used in reports for hybrid encoding at granularity g.
std::string granularity_label(int g);

/// One census for the sign-duplicated NoChange baseline ("baseline") followed
/// by one per granularity after hybrid encoding, in the order given.
std::vector<PatternCensus> census(std::span<const HalfWord> weights,
                                  std::span<const int> granularities, unsigned workers = 1);

struct SsePosition {
  double mean_sse = 0.0;           // over samples whose flip stayed finite
  std::uint64_t overflow_count = 0;  // flips that produced Inf/NaN
};

struct SseSweep {
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::array<SsePosition, HalfWord::kBits> positions{};
};

/// Draws n values uniform on (-1, 1), rounds each to binary16, flips each bit
/// position in turn and averages the squared change. Sample i depends only on
/// (seed, i); sums are taken per fixed-size chunk and combined in chunk order,
/// so the result does not depend on `workers`.
SseSweep sse_sweep(std::uint64_t n, std::uint64_t seed, unsigned workers = 1);

struct EnergyRow {
  std::string system;
  double read_nj = 0.0;
  double write_nj = 0.0;
  std::uint64_t read_cycles = 0;
  std::uint64_t write_cycles = 0;
  double delta_read_pct = 0.0;   // relative to the baseline row; negative = saving
  double delta_write_pct = 0.0;
};

/// Baseline row is raw storage without sign duplication; then one row per
/// granularity under hybrid encoding.
std::vector<EnergyRow> energy_comparison(std::span<const HalfWord> weights,
                                         std::span<const int> granularities,
                                         const CostTable& costs, unsigned workers = 1);

/// n weights uniform on (-1, 1), rounded to binary16; a pure function of
/// (n, seed).
std::vector<HalfWord> uniform_weights(std::size_t n, std::uint64_t seed);

}  // namespace mlcw
