#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "mlcw/codec.hpp"
#include "mlcw/half_word.hpp"

namespace mlcw {

/// Per-cell access cost of a 2-bit MLC STT-RAM cell, split by whether the
/// cell holds a one-step ("00"/"11") or a two-step ("01"/"10") pattern.
struct CostTable {
  double read_energy_stable = 0.0;        // nJ
  double read_energy_intermediate = 0.0;  // nJ
  double write_energy_stable = 0.0;       // nJ
  double write_energy_intermediate = 0.0; // nJ
  std::uint64_t read_latency_stable = 0;        // cycles
  std::uint64_t read_latency_intermediate = 0;  // cycles
  std::uint64_t write_latency_stable = 0;       // cycles
  std::uint64_t write_latency_intermediate = 0; // cycles

  /// Throws DomainError unless every value is non-negative and each
  /// intermediate cost is at least its stable counterpart.
  void validate() const;

  friend bool operator==(const CostTable&, const CostTable&) = default;
};

/// Hybrid-cell figures: the smaller of each soft/hard pair is charged to
/// stable patterns, the larger to intermediate ones.
CostTable default_cost_table() noexcept;

/// Parses `key=value` lines ('#' starts a comment) over the defaults. Keys are
/// the CostTable field names. Throws ParseError on unknown keys or bad numbers
/// and DomainError if the resulting table is invalid.
CostTable parse_cost_table(std::string_view text);
CostTable load_cost_table(const std::filesystem::path& path);

using CellHistogram = std::array<std::uint64_t, 4>;  // indexed by CellPattern

struct EnergyReport {
  double read_energy = 0.0;   // nJ
  double write_energy = 0.0;  // nJ
  std::uint64_t read_cycles = 0;
  std::uint64_t write_cycles = 0;
  CellHistogram cell_histogram{};

  std::uint64_t stable_cells() const noexcept {
    return cell_histogram[0] + cell_histogram[3];
  }
  std::uint64_t total_cells() const noexcept {
    return cell_histogram[0] + cell_histogram[1] + cell_histogram[2] + cell_histogram[3];
  }

  EnergyReport& operator+=(const EnergyReport& o) noexcept;
  friend EnergyReport operator+(EnergyReport a, const EnergyReport& b) noexcept {
    return a += b;
  }
};

CellHistogram cell_histogram(std::span<const HalfWord> words) noexcept;
CellHistogram cell_histogram(const EncodedBuffer& buffer) noexcept;

/// Charges one read and one write of every stored cell. Metadata symbols are
/// not charged.
EnergyReport charge(std::span<const HalfWord> words, const CostTable& costs) noexcept;
EnergyReport charge(const EncodedBuffer& buffer, const CostTable& costs) noexcept;

struct FaultSpec {
  double p = 0.02;  // per-cell flip probability for intermediate cells
  std::uint64_t seed = 0;

  static constexpr double kLowRate = 0.015;
  static constexpr double kHighRate = 0.02;

  void validate() const;
};

struct FaultStats {
  std::uint64_t vulnerable_cells = 0;
  std::uint64_t flipped_cells = 0;
};

/// Soft-error model: "00"/"11" cells never change; each "01"/"10" cell flips
/// exactly one of its two bits (chosen uniformly) with probability p. Every
/// decision is a pure function of (seed, global cell index) with global cell
/// index = word index * 8 + cell, so the result is independent of `workers`.
EncodedBuffer inject_faults(const EncodedBuffer& buffer, const FaultSpec& spec,
                            FaultStats* stats = nullptr, unsigned workers = 1);

/// Word-level form of inject_faults; `first_cell` is the global index of the
/// first cell of words[0].
void inject_faults_in_place(std::span<HalfWord> words, const FaultSpec& spec,
                            std::uint64_t first_cell = 0, FaultStats* stats = nullptr,
                            unsigned workers = 1);

/// Toggles one bit; position 0 is the sign. Throws RangeError if position is
/// outside [0, 16).
HalfWord flip_bit(HalfWord h, int position);

}  // namespace mlcw
