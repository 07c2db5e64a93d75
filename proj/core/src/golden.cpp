#include "mlcw/golden.hpp"

#include <array>
#include <string_view>

#include <fmt/format.h>

#include "mlcw/codec.hpp"
#include "mlcw/half_word.hpp"
#include "mlcw/mem_device.hpp"

namespace mlcw {

namespace {

struct SchemeRow {
  Scheme scheme;
  std::string_view stored;
  std::array<int, 4> counts;  // 00, 01, 10, 11
};

struct WorkedExample {
  double weight;
  std::string_view binary;
  std::array<SchemeRow, 3> rows;
  Scheme best;
};

constexpr std::array<WorkedExample, 3> kWorkedExamples = {{
    {0.004222,
     "00 01 11 00 01 01 00 11",
     {{{Scheme::NoChange, "00 01 11 00 01 01 00 11", {3, 3, 0, 2}},
       {Scheme::Rotate, "00 10 11 10 00 10 10 01", {2, 1, 4, 1}},
       {Scheme::Round, "00 01 11 00 01 01 00 00", {4, 3, 0, 1}}}},
     Scheme::NoChange},
    {0.020614,
     "00 10 01 01 01 00 01 11",
     {{{Scheme::NoChange, "00 10 01 01 01 00 01 11", {2, 4, 1, 1}},
       {Scheme::Rotate, "00 11 00 10 10 10 00 11", {3, 0, 3, 2}},
       {Scheme::Round, "00 10 01 01 01 00 00 11", {3, 3, 1, 1}}}},
     Scheme::Rotate},
    {0.0004982,
     "00 01 00 00 00 01 01 01",
     {{{Scheme::NoChange, "00 01 00 00 00 01 01 01", {4, 4, 0, 0}},
       {Scheme::Rotate, "00 10 10 00 00 00 10 10", {4, 0, 4, 0}},
       {Scheme::Round, "00 01 00 00 00 01 00 11", {5, 2, 0, 1}}}},
     Scheme::Round},
}};

// Rounding map rows: every nibble in a row maps to the row's target.
constexpr std::array<std::array<std::uint8_t, 5>, 4> kRoundingRows = {{
    {0b0000, 0b0001, 0b0010, 0b0011, 0b0000},
    {0b0100, 0b0101, 0b0110, 0b0111, 0b0011},
    {0b1000, 0b1001, 0b1010, 0b1011, 0b1100},
    {0b1100, 0b1101, 0b1110, 0b1111, 0b1111},
}};

constexpr std::array<std::pair<int, double>, 5> kOverhead = {{
    {1, 0.125}, {2, 0.0625}, {4, 0.03125}, {8, 0.015625}, {16, 0.0078125}}};

std::array<int, 4> pattern_counts(HalfWord h) {
  std::array<int, 4> c{};
  for (CellPattern p : cells(h)) ++c[static_cast<std::size_t>(p)];
  return c;
}

std::string counts_string(const std::array<int, 4>& c) {
  return fmt::format("{}/{}/{}/{}", c[0], c[1], c[2], c[3]);
}

}  // namespace

std::vector<GoldenCheck> run_golden_checks() {
  std::vector<GoldenCheck> checks;
  const auto record = [&](std::string name, bool ok, std::string detail) {
    checks.push_back({std::move(name), ok, ok ? std::string{} : std::move(detail)});
  };

  std::vector<HalfWord> example_words;
  for (const WorkedExample& ex : kWorkedExamples) {
    const HalfWord h = real_to_half(ex.weight);
    example_words.push_back(h);
    const std::string label = fmt::format("example {}", ex.weight);
    record(label + " binary", to_pairs(h) == ex.binary,
           fmt::format("expected {} got {}", ex.binary, to_pairs(h)));
    for (const SchemeRow& row : ex.rows) {
      const HalfWord stored = apply_scheme(h, row.scheme);
      const std::string row_label = fmt::format("{} {}", label, to_string(row.scheme));
      record(row_label + " output", to_pairs(stored) == row.stored,
             fmt::format("expected {} got {}", row.stored, to_pairs(stored)));
      const auto counts = pattern_counts(stored);
      record(row_label + " counts", counts == row.counts,
             fmt::format("expected {} got {}", counts_string(row.counts), counts_string(counts)));
    }
    const Scheme best = select_scheme(std::span<const HalfWord>(&h, 1));
    record(label + " best", best == ex.best,
           fmt::format("expected {} got {}", to_string(ex.best), to_string(best)));
  }

  const EncodedBuffer buf = encode_buffer(example_words, 1, SchemeSet::hybrid());
  bool stream_ok = buf.group_count() == kWorkedExamples.size();
  for (std::size_t i = 0; stream_ok && i < kWorkedExamples.size(); ++i) {
    const WorkedExample& ex = kWorkedExamples[i];
    const auto& row = ex.rows[static_cast<std::size_t>(ex.best)];
    stream_ok = buf.schemes[i] == ex.best && to_pairs(buf.words[i]) == row.stored;
  }
  record("final bit stream at granularity 1", stream_ok, "encoded buffer differs from worked rows");

  for (const auto& row : kRoundingRows) {
    for (std::size_t j = 0; j < 4; ++j) {
      const std::uint8_t got = round_nibble(row[j]);
      record(fmt::format("round nibble {:04b}", row[j]), got == row[4],
             fmt::format("expected {:04b} got {:04b}", row[4], got));
    }
  }

  for (const auto& [g, expected] : kOverhead) {
    const double got = metadata_overhead(g);
    record(fmt::format("overhead granularity {}", g), got == expected,
           fmt::format("expected {} got {}", expected, got));
  }

  const CostTable costs = default_cost_table();
  record("default cost table",
         costs.read_energy_stable == 0.427 && costs.read_energy_intermediate == 0.579 &&
             costs.write_energy_stable == 1.084 && costs.write_energy_intermediate == 2.653 &&
             costs.read_latency_stable == 14 && costs.read_latency_intermediate == 20 &&
             costs.write_latency_stable == 50 && costs.write_latency_intermediate == 95,
         "default cost table differs from the hybrid-cell figures");
  return checks;
}

}  // namespace mlcw
