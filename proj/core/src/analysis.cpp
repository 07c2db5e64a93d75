#include "mlcw/analysis.hpp"

#include <cmath>
#include <vector>

#include "mlcw/errors.hpp"
#include "mlcw/parallel.hpp"
#include "mlcw/random.hpp"

namespace mlcw {

std::string granularity_label(int g) { return "granularity_" + std::to_string(g); }

std::vector<PatternCensus> census(std::span<const HalfWord> weights,
                                  std::span<const int> granularities, unsigned workers) {
  std::vector<PatternCensus> out;
  out.reserve(granularities.size() + 1);

  EncodeOptions options;
  options.workers = workers;
  options.enabled = SchemeSet{Scheme::NoChange};
  out.push_back({"baseline", cell_histogram(encode_buffer(weights, options))});

  options.enabled = SchemeSet::hybrid();
  for (int g : granularities) {
    options.granularity = g;
    out.push_back({granularity_label(g), cell_histogram(encode_buffer(weights, options))});
  }
  return out;
}

namespace {

constexpr std::uint64_t kSampleStream = 2;
constexpr std::size_t kSseChunk = 1 << 16;

// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) noexcept {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const noexcept { return sum + carry; }
};

double uniform_open_unit(std::uint64_t seed, std::uint64_t i) {
  // Midpoint of a 2^-53 bin, then mapped to (-1, 1): never hits either end.
  const double u = to_unit(counter_hash(seed, kSampleStream, i)) + 0x1.0p-54;
  return 2.0 * u - 1.0;
}

}  // namespace

std::vector<HalfWord> uniform_weights(std::size_t n, std::uint64_t seed) {
  std::vector<HalfWord> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = real_to_half(uniform_open_unit(seed, i));
  return out;
}

SseSweep sse_sweep(std::uint64_t n, std::uint64_t seed, unsigned workers) {
  if (n == 0) throw DomainError("sse_sweep: sample count must be >= 1");

  struct ChunkResult {
    std::array<CompensatedSum, HalfWord::kBits> sums{};
    std::array<std::uint64_t, HalfWord::kBits> overflow{};
  };
  const std::size_t chunks = (n + kSseChunk - 1) / kSseChunk;
  std::vector<ChunkResult> partial(chunks);

  for_each_chunk(n, kSseChunk, workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
    ChunkResult& r = partial[c];
    for (std::size_t i = begin; i < end; ++i) {
      const HalfWord h = real_to_half(uniform_open_unit(seed, i));
      const double original = half_to_real(h);
      for (int pos = 0; pos < HalfWord::kBits; ++pos) {
        const HalfWord flipped = flip_bit(h, pos);
        if (!flipped.is_finite()) {
          ++r.overflow[pos];
          continue;
        }
        const double d = half_to_real(flipped) - original;
        r.sums[pos].add(d * d);
      }
    }
  });

  SseSweep out;
  out.samples = n;
  out.seed = seed;
  for (int pos = 0; pos < HalfWord::kBits; ++pos) {
    CompensatedSum total;
    std::uint64_t overflow = 0;
    for (const ChunkResult& r : partial) {
      total.add(r.sums[pos].value());
      overflow += r.overflow[pos];
    }
    const std::uint64_t finite = n - overflow;
    out.positions[pos].overflow_count = overflow;
    out.positions[pos].mean_sse = finite == 0 ? 0.0 : total.value() / static_cast<double>(finite);
  }
  return out;
}

std::vector<EnergyRow> energy_comparison(std::span<const HalfWord> weights,
                                         std::span<const int> granularities,
                                         const CostTable& costs, unsigned workers) {
  costs.validate();
  const auto row_from = [](std::string system, const EnergyReport& r) {
    EnergyRow row;
    row.system = std::move(system);
    row.read_nj = r.read_energy;
    row.write_nj = r.write_energy;
    row.read_cycles = r.read_cycles;
    row.write_cycles = r.write_cycles;
    return row;
  };
  const auto pct = [](double value, double base) {
    return base == 0.0 ? 0.0 : 100.0 * (value - base) / base;
  };

  std::vector<EnergyRow> rows;
  EncodeOptions options;
  options.workers = workers;
  options.enabled = SchemeSet::unprotected();
  const EnergyRow baseline = row_from("baseline", charge(encode_buffer(weights, options), costs));
  rows.push_back(baseline);

  options.enabled = SchemeSet::hybrid();
  for (int g : granularities) {
    options.granularity = g;
    EnergyRow row = row_from(granularity_label(g), charge(encode_buffer(weights, options), costs));
    row.delta_read_pct = pct(row.read_nj, baseline.read_nj);
    row.delta_write_pct = pct(row.write_nj, baseline.write_nj);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mlcw
