// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "mlcw/analysis.hpp"
#include "mlcw/buffer_format.hpp"
#include "mlcw/codec.hpp"
#include "mlcw/golden.hpp"
#include "mlcw/half_word.hpp"
#include "mlcw/mem_device.hpp"
#include "mlcw/tinynn.hpp"

#ifdef MLCW_HAVE_CLI
#include "cli/commands.hpp"
#include "cli/weight_file.hpp"
#endif

namespace {

using namespace mlcw;

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    passed = false;
    if (detail.size() < 400) detail += (detail.empty() ? "" : "; ") + what;
  }
};

// Golden checks whose names start with `prefix`; `expected` guards against the
// table silently shrinking.
Outcome golden_subset(const std::vector<std::string>& prefixes, std::size_t expected) {
  Outcome o;
  std::size_t seen = 0;
  for (const GoldenCheck& c : run_golden_checks()) {
    const bool match = std::any_of(prefixes.begin(), prefixes.end(), [&](const std::string& p) {
      return c.name.rfind(p, 0) == 0;
    });
    if (!match) continue;
    ++seen;
    o.require(c.passed, c.name + ": " + c.detail);
  }
  o.require(seen == expected, fmt::format("expected {} checks, found {}", expected, seen));
  o.detail = o.passed ? fmt::format("{} exact checks", seen) : o.detail;
  return o;
}

// 1. Worked examples: binary form, nine scheme outputs, pattern counts, best
//    scheme, and the encoded stream at granularity 1.
Outcome criterion_golden_table() {
  return golden_subset({"example ", "final bit stream"}, 3 * (1 + 3 * 2 + 1) + 1);
}

// 2. All sixteen nibble mappings of the rounding table.
Outcome criterion_rounding_table() {
  Outcome o = golden_subset({"round nibble"}, 16);
  o.require(round_nibble(0b0011) == 0b0000, "0011 must round to 0000");
  return o;
}

// 3. Metadata overhead rows.
Outcome criterion_overhead() { return golden_subset({"overhead granularity"}, 5); }

// 4. Exhaustive round trip over every word whose exponent MSB is free.
Outcome criterion_lossless() {
  Outcome o;
  std::vector<HalfWord> words;
  for (std::uint32_t b = 0; b <= 0xFFFF; ++b) {
    const HalfWord h{static_cast<std::uint16_t>(b)};
    if (!h.bit(1)) words.push_back(h);
  }
  std::size_t round_checked = 0;
  double worst_ulps = 0.0;
  for (HalfWord h : words) {
    for (Scheme s : {Scheme::NoChange, Scheme::Rotate}) {
      bool mismatch = false;
      const HalfWord back = unapply_scheme(apply_scheme(h, s), s, &mismatch);
      o.require(back == h && !mismatch,
                fmt::format("{} not lossless for {}", to_string(s), to_pairs(h)));
    }
    const HalfWord rounded = unapply_scheme(apply_scheme(h, Scheme::Round), Scheme::Round);
    const unsigned exp = h.exponent_field();
    const double ulp = std::ldexp(1.0, (exp == 0 ? 1 : static_cast<int>(exp)) - 25);
    const double ulps = std::fabs(half_to_real(rounded) - half_to_real(h)) / ulp;
    worst_ulps = std::max(worst_ulps, ulps);
    o.require(ulps <= 4.0, fmt::format("Round off by {} ulp for {}", ulps, to_pairs(h)));
    ++round_checked;
  }
  // Whole-buffer path: a lossless-only codec must reproduce every word.
  for (int g : kGranularities) {
    const SchemeSet lossless = SchemeSet{}.with(Scheme::NoChange).with(Scheme::Rotate);
    const EncodedBuffer buf = encode_buffer(words, g, lossless);
    DecodeStats stats;
    o.require(decode_buffer(buf, &stats) == words && stats.sign_mismatches == 0,
              fmt::format("buffer round trip failed at granularity {}", g));
  }
  if (o.passed) {
    o.detail = fmt::format("{} words; Round worst error {} ulp", round_checked, worst_ulps);
  }
  return o;
}

// 5. |value| < 2 implies the exponent MSB is zero, over all 2^16 words.
Outcome criterion_unused_bit() {
  Outcome o;
  std::size_t small = 0;
  for (std::uint32_t b = 0; b <= 0xFFFF; ++b) {
    const HalfWord h{static_cast<std::uint16_t>(b)};
    if (h.is_nan()) continue;
    if (std::fabs(half_to_real(h)) < 2.0) {
      ++small;
      o.require(!h.bit(1), fmt::format("{} has |v| < 2 and bit 1 set", to_pairs(h)));
    }
  }
  if (o.passed) o.detail = fmt::format("{} words with |v| < 2, none uses bit 1", small);
  return o;
}

// 6. Fault injection only touches intermediate cells; the duplicated sign pair
//    survives; the flip count is binomial.
Outcome criterion_fault_immunity() {
  Outcome o;
  constexpr std::size_t kWords = 1 << 17;  // 2^20 cells
  const FaultSpec spec{FaultSpec::kHighRate, 20240601};
  const std::vector<HalfWord> weights = uniform_weights(kWords, 6);
  std::string summary;
  for (int g : kGranularities) {
    const EncodedBuffer clean = encode_buffer(weights, g, SchemeSet::hybrid());
    FaultStats stats;
    const EncodedBuffer faulty = inject_faults(clean, spec, &stats, 4);
    std::uint64_t vulnerable = 0;
    std::uint64_t changed = 0;
    std::uint64_t stable_changed = 0;
    std::uint64_t sign_pair_bad = 0;
    for (std::size_t i = 0; i < kWords; ++i) {
      const HalfWord a = clean.words[i];
      const HalfWord b = faulty.words[i];
      for (int k = 0; k < HalfWord::kCells; ++k) {
        const bool differs = a.cell(k) != b.cell(k);
        if (is_stable(a.cell(k))) {
          stable_changed += differs ? 1 : 0;
        } else {
          ++vulnerable;
          changed += differs ? 1 : 0;
        }
      }
      if (!is_stable(b.cell(0)) || b.bit(0) != a.bit(0)) ++sign_pair_bad;
    }
    DecodeStats ds;
    const std::vector<HalfWord> decoded = decode_buffer(faulty, &ds);
    std::uint64_t sign_flipped = 0;
    for (std::size_t i = 0; i < kWords; ++i) {
      sign_flipped += decoded[i].sign() != weights[i].sign() ? 1 : 0;
    }
    const double n = static_cast<double>(vulnerable);
    const double mean = n * spec.p;
    const double sigma = std::sqrt(n * spec.p * (1.0 - spec.p));
    const double z = (static_cast<double>(changed) - mean) / sigma;
    o.require(stable_changed == 0, fmt::format("g={}: {} stable cells changed", g, stable_changed));
    o.require(sign_pair_bad == 0 && ds.sign_mismatches == 0 && sign_flipped == 0,
              fmt::format("g={}: sign pair corrupted", g));
    o.require(std::fabs(z) <= 5.0, fmt::format("g={}: flip count z = {:.2f}", g, z));
    o.require(stats.flipped_cells == changed && stats.vulnerable_cells == vulnerable,
              fmt::format("g={}: injector statistics disagree with the cell diff", g));
    summary += fmt::format("{}g={}: {} flips / {} vulnerable (z={:+.2f})", summary.empty() ? "" : ", ",
                           g, changed, vulnerable, z);
  }
  if (o.passed) o.detail = fmt::format("{} cells at p={}; {}", kWords * 8, spec.p, summary);
  return o;
}

// 7. Bit-position SSE sweep: sign bit matches 4/3, tail bits are the cheapest.
Outcome criterion_sse() {
  Outcome o;
  const SseSweep sweep = sse_sweep(1'000'000, 7, 4);
  const double sign = sweep.positions[0].mean_sse;
  const double rel = std::fabs(sign - 4.0 / 3.0) / (4.0 / 3.0);
  o.require(rel < 0.01, fmt::format("sign-bit SSE {} is {:.3f}% from 4/3", sign, rel * 100));
  double max_tail = 0.0;
  double min_head = std::numeric_limits<double>::infinity();
  for (int pos = 0; pos < 12; ++pos) min_head = std::min(min_head, sweep.positions[pos].mean_sse);
  for (int pos = 12; pos < 16; ++pos) max_tail = std::max(max_tail, sweep.positions[pos].mean_sse);
  o.require(max_tail < min_head,
            fmt::format("max SSE over 12-15 ({}) not below min over 0-11 ({})", max_tail, min_head));
  if (o.passed) {
    o.detail = fmt::format("sign SSE {:.6f} ({:.3f}% off 4/3); max tail {:.3g} < min head {:.3g}",
                           sign, rel * 100, max_tail, min_head);
  }
  return o;
}

// 8. Hybrid saves read and write energy at every granularity; savings decay.
Outcome criterion_energy() {
  Outcome o;
  const std::vector<HalfWord> weights = uniform_weights(10'000, 8);
  const auto rows = energy_comparison(weights, kGranularities, default_cost_table(), 4);
  o.require(rows.size() == kGranularities.size() + 1, "unexpected row count");
  double prev_read = std::numeric_limits<double>::infinity();
  double prev_write = std::numeric_limits<double>::infinity();
  std::string summary;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const EnergyRow& r = rows[i];
    const double read_saving = -r.delta_read_pct;
    const double write_saving = -r.delta_write_pct;
    o.require(r.read_nj < rows[0].read_nj && r.write_nj < rows[0].write_nj,
              r.system + ": not below baseline");
    o.require(read_saving <= prev_read && write_saving <= prev_write,
              r.system + ": saving larger than at the finer granularity");
    prev_read = read_saving;
    prev_write = write_saving;
    summary += fmt::format("{}{}: read -{:.2f}% write -{:.2f}%", summary.empty() ? "" : ", ",
                           r.system, read_saving, write_saving);
  }
  if (o.passed) o.detail = summary;
  return o;
}

// 9. Tiny-MLP accuracy ordering at p = 0.02 over 20 fault seeds.
Outcome criterion_accuracy() {
  Outcome o;
  constexpr std::uint64_t kSeed = 1;  // same derivation as `mlcw accuracy --seed 1`
  constexpr int kTrials = 20;
  const tinynn::Dataset ds = tinynn::make_dataset(kSeed);
  const tinynn::MlpModel model = tinynn::train(ds, kSeed + 1);
  tinynn::InferenceOptions options;
  options.workers = 4;
  const auto report = tinynn::evaluate_systems(model, ds, tinynn::kAllSystems,
                                               FaultSpec::kHighRate, kTrials, kSeed + 2, options);
  const auto& ef = report.at(tinynn::System::ErrorFree);
  const auto& un = report.at(tinynn::System::Unprotected);
  const auto& rd = report.at(tinynn::System::RoundOnly);
  const auto& rt = report.at(tinynn::System::RotateOnly);
  const auto& hy = report.at(tinynn::System::Hybrid);

  o.require(std::fabs(hy.mean - ef.mean) <= 0.01,
            fmt::format("hybrid {:.4f} not within 0.01 of error-free {:.4f}", hy.mean, ef.mean));

  // One-sided Welch t-test: H1 mean(error-free) > mean(unprotected).
  const double n = kTrials;
  const double v1 = ef.stddev * ef.stddev / n;
  const double v2 = un.stddev * un.stddev / n;
  const double diff = ef.mean - un.mean;
  bool significant = false;
  double t = 0.0;
  if (v1 + v2 == 0.0) {
    significant = diff > 0.0;
  } else {
    t = diff / std::sqrt(v1 + v2);
    const double df = (v1 + v2) * (v1 + v2) /
                      (v1 * v1 / (n - 1) + v2 * v2 / (n - 1));
    const boost::math::students_t dist(df);
    significant = t > boost::math::quantile(dist, 0.95);
  }
  o.require(significant, fmt::format("unprotected {:.4f} not significantly below error-free "
                                     "(t={:.2f})", un.mean, t));
  o.require(hy.mean >= rt.mean,
            fmt::format("hybrid {:.4f} below rotate-only {:.4f}", hy.mean, rt.mean));
  o.require(hy.mean >= rd.mean,
            fmt::format("hybrid {:.4f} below round-only {:.4f}", hy.mean, rd.mean));
  const std::string means =
      fmt::format("error_free {:.4f}, unprotected {:.4f}, round {:.4f}, rotate {:.4f}, "
                  "hybrid {:.4f}",
                  ef.mean, un.mean, rd.mean, rt.mean, hy.mean);
  o.detail = o.passed ? means : o.detail + " [" + means + "]";
  return o;
}

// 10. Every command is byte-identical across repeated and multi-threaded runs.
Outcome criterion_determinism() {
  Outcome o;
#ifdef MLCW_HAVE_CLI
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "mlcw_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto p = [&](const std::string& name) { return (dir / name).string(); };
  write_file_bytes(p("w.f16"), cli::encode_f16le(uniform_weights(20'000, 10)));
  std::ofstream(p("costs.txt")) << "read_energy_intermediate = 0.6\n";

  const auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  // Each command writes out.bin (or stdout); inputs are produced up front.
  const std::vector<std::vector<std::string>> commands = {
      {"encode", p("w.f16"), "-g", "4", "-o", p("out.bin")},
      {"decode", p("enc.mlcw"), "-o", p("out.bin")},
      {"inject", p("enc.mlcw"), "-p", "0.02", "--seed", "9", "-o", p("out.bin")},
      {"stats", p("w.f16"), "-o", p("out.bin")},
      {"energy", p("w.f16"), "--costs", p("costs.txt"), "-o", p("out.bin")},
      {"sse", "-n", "200000", "--seed", "4", "-o", p("out.bin")},
      {"accuracy", "--trials", "6", "-p", "0.02", "-o", p("out.bin")},
      {"verify"},
  };
  const auto run = [&](std::vector<std::string> args, const std::string& threads) {
    args.insert(args.begin(), {"mlcw", "--threads", threads});
    fs::remove(p("out.bin"));
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return fmt::format("{}\n{}\n{}", code, out.str(), slurp(p("out.bin")));
  };
  std::ostringstream sink;
  cli::run({"mlcw", "encode", p("w.f16"), "-o", p("enc.mlcw")}, sink, sink);
  for (const auto& cmd : commands) {
    const std::string first = run(cmd, "1");
    o.require(first.rfind("0\n", 0) == 0, cmd[0] + ": nonzero exit");
    o.require(run(cmd, "1") == first, cmd[0] + ": repeated run differs");
    o.require(run(cmd, "4") == first, cmd[0] + ": 4-thread run differs");
  }
  fs::remove_all(dir);
  if (o.passed) o.detail = fmt::format("{} commands x (repeat, 4 threads)", commands.size());
#else
  o.require(false, "CLI not built");
#endif
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"golden worked examples", criterion_golden_table},
      {"rounding table", criterion_rounding_table},
      {"metadata overhead", criterion_overhead},
      {"exhaustive losslessness", criterion_lossless},
      {"unused exponent bit", criterion_unused_bit},
      {"fault-model immunity", criterion_fault_immunity},
      {"bit-position SSE sweep", criterion_sse},
      {"energy direction and decay", criterion_energy},
      {"tiny-MLP accuracy ordering", criterion_accuracy},
      {"determinism", criterion_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome.passed = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += outcome.passed ? 0 : 1;
    fmt::print("{} criterion {:2}: {} ({:.2f}s) - {}\n", outcome.passed ? "PASS" : "FAIL", i + 1,
               criteria[i].first, secs, outcome.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
