#include "mlcw/mem_device.hpp"

#include <atomic>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mlcw/errors.hpp"
#include "mlcw/parallel.hpp"
#include "mlcw/random.hpp"

namespace mlcw {

void CostTable::validate() const {
  const auto check = [](double stable, double intermediate, const char* what) {
    if (!(stable >= 0.0) || !(intermediate >= 0.0)) {
      throw DomainError(std::string("cost table: negative ") + what);
    }
    if (intermediate < stable) {
      throw DomainError(std::string("cost table: intermediate ") + what + " below stable");
    }
  };
  check(read_energy_stable, read_energy_intermediate, "read energy");
  check(write_energy_stable, write_energy_intermediate, "write energy");
  check(static_cast<double>(read_latency_stable),
        static_cast<double>(read_latency_intermediate), "read latency");
  check(static_cast<double>(write_latency_stable),
        static_cast<double>(write_latency_intermediate), "write latency");
}

CostTable default_cost_table() noexcept {
  CostTable t;
  t.read_energy_stable = 0.427;
  t.read_energy_intermediate = 0.579;
  t.write_energy_stable = 1.084;
  t.write_energy_intermediate = 2.653;
  t.read_latency_stable = 14;
  t.read_latency_intermediate = 20;
  t.write_latency_stable = 50;
  t.write_latency_intermediate = 95;
  return t;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view text, std::string_view key) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError("cost table: bad value for '" + std::string(key) + "': '" +
                     std::string(text) + "'");
  }
  return value;
}

}  // namespace

CostTable parse_cost_table(std::string_view text) {
  CostTable t = default_cost_table();
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("cost table line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));

    if (key == "read_energy_stable") t.read_energy_stable = parse_number<double>(value, key);
    else if (key == "read_energy_intermediate") t.read_energy_intermediate = parse_number<double>(value, key);
    else if (key == "write_energy_stable") t.write_energy_stable = parse_number<double>(value, key);
    else if (key == "write_energy_intermediate") t.write_energy_intermediate = parse_number<double>(value, key);
    else if (key == "read_latency_stable") t.read_latency_stable = parse_number<std::uint64_t>(value, key);
    else if (key == "read_latency_intermediate") t.read_latency_intermediate = parse_number<std::uint64_t>(value, key);
    else if (key == "write_latency_stable") t.write_latency_stable = parse_number<std::uint64_t>(value, key);
    else if (key == "write_latency_intermediate") t.write_latency_intermediate = parse_number<std::uint64_t>(value, key);
    else throw ParseError("cost table: unknown key '" + std::string(key) + "'");
  }
  t.validate();
  return t;
}

CostTable load_cost_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open cost table " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_cost_table(ss.str());
}

EnergyReport& EnergyReport::operator+=(const EnergyReport& o) noexcept {
  read_energy += o.read_energy;
  write_energy += o.write_energy;
  read_cycles += o.read_cycles;
  write_cycles += o.write_cycles;
  for (std::size_t i = 0; i < cell_histogram.size(); ++i) cell_histogram[i] += o.cell_histogram[i];
  return *this;
}

CellHistogram cell_histogram(std::span<const HalfWord> words) noexcept {
  CellHistogram h{};
  for (HalfWord w : words) {
    for (int k = 0; k < HalfWord::kCells; ++k) ++h[static_cast<std::size_t>(w.cell(k))];
  }
  return h;
}

CellHistogram cell_histogram(const EncodedBuffer& buffer) noexcept {
  return cell_histogram(buffer.words);
}

EnergyReport charge(std::span<const HalfWord> words, const CostTable& costs) noexcept {
  EnergyReport r;
  r.cell_histogram = cell_histogram(words);
  // Totals are formed from the histogram so the result is exact in the counts
  // and independent of word order.
  const auto stable = static_cast<double>(r.stable_cells());
  const auto intermediate = static_cast<double>(r.total_cells() - r.stable_cells());
  r.read_energy = stable * costs.read_energy_stable + intermediate * costs.read_energy_intermediate;
  r.write_energy =
      stable * costs.write_energy_stable + intermediate * costs.write_energy_intermediate;
  const std::uint64_t s = r.stable_cells();
  const std::uint64_t m = r.total_cells() - s;
  r.read_cycles = s * costs.read_latency_stable + m * costs.read_latency_intermediate;
  r.write_cycles = s * costs.write_latency_stable + m * costs.write_latency_intermediate;
  return r;
}

EnergyReport charge(const EncodedBuffer& buffer, const CostTable& costs) noexcept {
  return charge(std::span<const HalfWord>(buffer.words), costs);
}

void FaultSpec::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("fault probability must lie in [0, 1]");
}

namespace {
constexpr std::uint64_t kStreamFlip = 0;
constexpr std::uint64_t kStreamWhichBit = 1;
constexpr std::size_t kWordsPerChunk = 1 << 14;
}  // namespace

void inject_faults_in_place(std::span<HalfWord> words, const FaultSpec& spec,
                            std::uint64_t first_cell, FaultStats* stats, unsigned workers) {
  spec.validate();
  std::atomic<std::uint64_t> vulnerable{0};
  std::atomic<std::uint64_t> flipped{0};
  for_each_chunk(words.size(), kWordsPerChunk, workers,
                 [&](std::size_t, std::size_t begin, std::size_t end) {
                   std::uint64_t local_vulnerable = 0;
                   std::uint64_t local_flipped = 0;
                   for (std::size_t i = begin; i < end; ++i) {
                     HalfWord w = words[i];
                     for (int k = 0; k < HalfWord::kCells; ++k) {
                       if (is_stable(w.cell(k))) continue;
                       ++local_vulnerable;
                       const std::uint64_t cell = first_cell + i * HalfWord::kCells + k;
                       if (to_unit(counter_hash(spec.seed, kStreamFlip, cell)) >= spec.p) continue;
                       const int pos = 2 * k + static_cast<int>(
                                           counter_hash(spec.seed, kStreamWhichBit, cell) & 1U);
                       w = w.with_bit(pos, !w.bit(pos));
                       ++local_flipped;
                     }
                     words[i] = w;
                   }
                   vulnerable.fetch_add(local_vulnerable, std::memory_order_relaxed);
                   flipped.fetch_add(local_flipped, std::memory_order_relaxed);
                 });
  if (stats != nullptr) {
    stats->vulnerable_cells += vulnerable.load();
    stats->flipped_cells += flipped.load();
  }
}

EncodedBuffer inject_faults(const EncodedBuffer& buffer, const FaultSpec& spec, FaultStats* stats,
                            unsigned workers) {
  EncodedBuffer out = buffer;
  inject_faults_in_place(out.words, spec, 0, stats, workers);
  return out;
}

HalfWord flip_bit(HalfWord h, int position) {
  if (position < 0 || position >= HalfWord::kBits) {
    throw RangeError("flip_bit: position " + std::to_string(position) + " outside [0, 16)");
  }
  return h.with_bit(position, !h.bit(position));
}

}  // namespace mlcw
