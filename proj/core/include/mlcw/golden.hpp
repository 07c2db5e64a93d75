#pragma once

#include <string>
#include <vector>

namespace mlcw {

struct GoldenCheck {
  std::string name;
  bool passed = false;
  std::string detail;  // expected vs. actual on failure
};

/// Pinned reference cases: the three worked selection examples (binary form,
/// every scheme output, pattern counts, chosen scheme, final bit stream),
/// the 16-entry rounding map, and the metadata overhead per granularity.
std::vector<GoldenCheck> run_golden_checks();

}  // namespace mlcw
