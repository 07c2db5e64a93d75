#include "mlcw/csv.hpp"

#include <fmt/format.h>

namespace mlcw {

std::string census_csv(std::span<const PatternCensus> rows) {
  std::string out = "system,p00,p01,p10,p11\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{}\n", r.system, r.counts[0], r.counts[1], r.counts[2],
                       r.counts[3]);
  }
  return out;
}

std::string sse_csv(const SseSweep& sweep) {
  std::string out = "position,mean_sse,overflow_count\n";
  for (std::size_t pos = 0; pos < sweep.positions.size(); ++pos) {
    out += fmt::format("{},{},{}\n", pos, sweep.positions[pos].mean_sse,
                       sweep.positions[pos].overflow_count);
  }
  return out;
}

std::string energy_csv(std::span<const EnergyRow> rows) {
  std::string out =
      "system,read_nj,write_nj,read_cycles,write_cycles,delta_read_pct,delta_write_pct\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{}\n", r.system, r.read_nj, r.write_nj, r.read_cycles,
                       r.write_cycles, r.delta_read_pct, r.delta_write_pct);
  }
  return out;
}

std::string accuracy_csv(const tinynn::AccuracyReport& report) {
  std::string out = "system,granularity,p,mean_accuracy,stddev,trials\n";
  for (const auto& s : report.systems) {
    out += fmt::format("{},{},{},{},{},{}\n", tinynn::to_string(s.system), report.granularity,
                       report.p, s.mean, s.stddev, report.trials);
  }
  return out;
}

}  // namespace mlcw
