#pragma once

#include <span>
#include <string>

#include "mlcw/analysis.hpp"
#include "mlcw/tinynn.hpp"

namespace mlcw {

// Report writers. Every table has a header row and a frozen column order;
// numbers use '.' as decimal separator and the shortest round-trip form.

/// system,p00,p01,p10,p11
std::string census_csv(std::span<const PatternCensus> rows);
/// position,mean_sse,overflow_count
std::string sse_csv(const SseSweep& sweep);
/// system,read_nj,write_nj,read_cycles,write_cycles,delta_read_pct,delta_write_pct
std::string energy_csv(std::span<const EnergyRow> rows);
/// system,granularity,p,mean_accuracy,stddev,trials
std::string accuracy_csv(const tinynn::AccuracyReport& report);

}  // namespace mlcw
