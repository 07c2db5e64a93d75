#include "cli/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "cli/weight_file.hpp"
#include "mlcw/analysis.hpp"
#include "mlcw/buffer_format.hpp"
#include "mlcw/codec.hpp"
#include "mlcw/csv.hpp"
#include "mlcw/errors.hpp"
#include "mlcw/golden.hpp"
#include "mlcw/mem_device.hpp"
#include "mlcw/tinynn.hpp"

namespace mlcw::cli {

namespace {

const std::vector<int> kDefaultGranularities(kGranularities.begin(), kGranularities.end());

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path);
  file << text;
  if (!file) throw IoError("write failed: " + path);
}

CLI::Validator granularity_check() {
  return CLI::IsMember(kDefaultGranularities);
}

struct Options {
  unsigned threads = 1;

  std::string input;
  std::string output;
  std::string format = "f16le";
  std::string manifest;
  std::string schemes = "hybrid";
  std::string costs;
  int granularity = 1;
  std::vector<int> granularities = kDefaultGranularities;
  double p = FaultSpec::kHighRate;
  std::uint64_t seed = 1;
  std::uint64_t samples = 1000000;
  int trials = 20;
  bool no_sign_protection = false;
};

std::vector<HalfWord> load_input(const Options& o) {
  std::optional<std::filesystem::path> manifest;
  if (!o.manifest.empty()) manifest = o.manifest;
  return load_weights(o.input, parse_weight_format(o.format), manifest);
}

int cmd_encode(const Options& o) {
  EncodeOptions enc;
  enc.granularity = o.granularity;
  enc.enabled = parse_scheme_set(o.schemes);
  enc.workers = o.threads;
  write_buffer_file(o.output, encode_buffer(load_input(o), enc));
  return kExitOk;
}

int cmd_decode(const Options& o, std::ostream& err) {
  DecodeStats stats;
  const auto words = decode_buffer(read_buffer_file(o.input), &stats, o.threads);
  write_file_bytes(o.output, encode_f16le(words));
  if (stats.sign_mismatches != 0) {
    err << "warning: " << stats.sign_mismatches << " sign-pair mismatches resolved to bit 0\n";
  }
  return kExitOk;
}

int cmd_inject(const Options& o, std::ostream& err) {
  FaultStats stats;
  const EncodedBuffer out =
      inject_faults(read_buffer_file(o.input), FaultSpec{o.p, o.seed}, &stats, o.threads);
  write_buffer_file(o.output, out);
  err << "flipped " << stats.flipped_cells << " of " << stats.vulnerable_cells
      << " intermediate cells\n";
  return kExitOk;
}

int cmd_stats(const Options& o, std::ostream& out) {
  const auto rows = census(load_input(o), o.granularities, o.threads);
  emit(census_csv(rows), o.output, out);
  return kExitOk;
}

int cmd_energy(const Options& o, std::ostream& out) {
  const CostTable costs = o.costs.empty() ? default_cost_table() : load_cost_table(o.costs);
  const auto rows = energy_comparison(load_input(o), o.granularities, costs, o.threads);
  emit(energy_csv(rows), o.output, out);
  return kExitOk;
}

int cmd_sse(const Options& o, std::ostream& out) {
  emit(sse_csv(sse_sweep(o.samples, o.seed, o.threads)), o.output, out);
  return kExitOk;
}

int cmd_accuracy(const Options& o, std::ostream& out) {
  // Dataset, training and fault seeds all derive from --seed.
  const tinynn::Dataset ds = tinynn::make_dataset(o.seed);
  const tinynn::MlpModel model = tinynn::train(ds, o.seed + 1);
  tinynn::InferenceOptions inference;
  inference.granularity = o.granularity;
  inference.sign_protection = !o.no_sign_protection;
  inference.workers = o.threads;
  const auto report = tinynn::evaluate_systems(model, ds, tinynn::kAllSystems, o.p, o.trials,
                                               o.seed + 2, inference);
  emit(accuracy_csv(report), o.output, out);
  return kExitOk;
}

int cmd_verify(std::ostream& out) {
  int failed = 0;
  const auto checks = run_golden_checks();
  for (const auto& c : checks) {
    if (!c.passed) {
      ++failed;
      out << "FAIL " << c.name << ": " << c.detail << '\n';
    }
  }
  out << (checks.size() - static_cast<std::size_t>(failed)) << "/" << checks.size()
      << " golden checks passed\n";
  return failed == 0 ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Encode half-precision weights for 2-bit MLC STT-RAM and measure the effect"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--threads", o.threads, "Worker threads (0 = all cores); output is identical")
      ->capture_default_str();

  const auto add_input = [&](CLI::App* cmd, const char* what) {
    cmd->add_option("input", o.input, what)->required();
  };
  const auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", o.format, "Weight file element type")
        ->check(CLI::IsMember({"f16le", "f32le"}))
        ->capture_default_str();
    cmd->add_option("--manifest", o.manifest, "Sidecar manifest (default: <input>.manifest)");
  };
  const auto add_granularities = [&](CLI::App* cmd) {
    cmd->add_option("--granularities", o.granularities, "Group sizes to evaluate")
        ->delimiter(',')
        ->check(granularity_check())
        ->capture_default_str();
  };

  auto* encode = app.add_subcommand("encode", "Encode a weight file into an MLCW buffer");
  add_input(encode, "Weight file");
  add_format(encode);
  encode->add_option("-o,--output", o.output, "Buffer file")->required();
  encode->add_option("-g,--granularity", o.granularity)->check(granularity_check())
      ->capture_default_str();
  encode->add_option("--schemes", o.schemes,
                     "hybrid | unprotected | comma list of nochange,rotate,round")
      ->capture_default_str();

  auto* decode = app.add_subcommand("decode", "Decode an MLCW buffer to f16le weights");
  add_input(decode, "Buffer file");
  decode->add_option("-o,--output", o.output, "Weight file (f16le)")->required();

  auto* inject = app.add_subcommand("inject", "Inject soft errors into an MLCW buffer");
  add_input(inject, "Buffer file");
  inject->add_option("-o,--output", o.output, "Buffer file")->required();
  inject->add_option("-p,--p", o.p, "Flip probability of an intermediate cell")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  inject->add_option("--seed", o.seed)->capture_default_str();

  auto* stats = app.add_subcommand("stats", "Cell-pattern census (census.csv)");
  add_input(stats, "Weight file");
  add_format(stats);
  add_granularities(stats);
  stats->add_option("-o,--output", o.output, "CSV path (default stdout)");

  auto* energy = app.add_subcommand("energy", "Read/write energy per system (energy.csv)");
  add_input(energy, "Weight file");
  add_format(energy);
  add_granularities(energy);
  energy->add_option("--costs", o.costs, "key=value cost table override");
  energy->add_option("-o,--output", o.output, "CSV path (default stdout)");

  auto* sse = app.add_subcommand("sse", "Per-bit-position flip error sweep (sse.csv)");
  sse->add_option("-n,--n", o.samples, "Sample count")->check(CLI::PositiveNumber)
      ->capture_default_str();
  sse->add_option("--seed", o.seed)->capture_default_str();
  sse->add_option("-o,--output", o.output, "CSV path (default stdout)");

  auto* acc = app.add_subcommand("accuracy", "Tiny-MLP accuracy per storage system (accuracy.csv)");
  acc->add_option("-p,--p", o.p)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  acc->add_option("-g,--granularity", o.granularity)->check(granularity_check())
      ->capture_default_str();
  acc->add_option("--trials", o.trials)->check(CLI::PositiveNumber)->capture_default_str();
  acc->add_option("--seed", o.seed)->capture_default_str();
  acc->add_flag("--no-sign-protection", o.no_sign_protection,
                "Ablation: schemes without the sign copy");
  acc->add_option("-o,--output", o.output, "CSV path (default stdout)");

  auto* verify = app.add_subcommand("verify", "Run the pinned golden checks");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (encode->parsed()) return cmd_encode(o);
    if (decode->parsed()) return cmd_decode(o, err);
    if (inject->parsed()) return cmd_inject(o, err);
    if (stats->parsed()) return cmd_stats(o, out);
    if (energy->parsed()) return cmd_energy(o, out);
    if (sse->parsed()) return cmd_sse(o, out);
    if (acc->parsed()) return cmd_accuracy(o, out);
    if (verify->parsed()) return cmd_verify(out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const RangeError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace mlcw::cli
