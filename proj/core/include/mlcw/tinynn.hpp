#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mlcw/codec.hpp"
#include "mlcw/mem_device.hpp"

namespace mlcw::tinynn {

/// Gaussian class clusters, split into train and test sets.
struct DatasetConfig {
  int classes = 10;
  int dim = 64;
  int train_per_class = 200;
  int test_per_class = 50;
  double center_scale = 0.7;  // stddev of each cluster-center coordinate
  double noise = 1.0;         // stddev of a sample around its center
};

struct Dataset {
  int classes = 0;
  int dim = 0;
  std::uint64_t seed = 0;
  std::vector<double> train_x;  // row-major, train_size x dim
  std::vector<int> train_y;
  std::vector<double> test_x;
  std::vector<int> test_y;

  std::size_t train_size() const noexcept { return train_y.size(); }
  std::size_t test_size() const noexcept { return test_y.size(); }
};

Dataset make_dataset(std::uint64_t seed, const DatasetConfig& config = {});

/// dim -> hidden (ReLU) -> classes.
///
/// After training the stored parameters are normalized into [-1, 1]: layer 1
/// is divided by its max-abs s1 and layer 2 by its max-abs s2. ReLU commutes
/// with positive scaling, so the hidden activations shrink by s1; that factor
/// is restored by `hidden_scale` at inference. The output layer's division
/// only rescales logits, which leaves the argmax unchanged.
struct MlpModel {
  int input_dim = 0;
  int hidden_dim = 0;
  int output_dim = 0;
  std::vector<double> w1;  // hidden x input
  std::vector<double> b1;
  std::vector<double> w2;  // output x hidden
  std::vector<double> b2;
  double hidden_scale = 1.0;
  bool normalized = false;

  std::size_t parameter_count() const noexcept {
    return w1.size() + b1.size() + w2.size() + b2.size();
  }
  /// w1, b1, w2, b2 concatenated.
  std::vector<double> parameters() const;
  /// Same architecture and hidden_scale with the given parameters.
  MlpModel with_parameters(std::span<const double> params) const;

  /// Logits for one input row.
  void forward(std::span<const double> x, std::span<double> logits) const;
  int predict(std::span<const double> x) const;

  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

struct TrainConfig {
  int hidden = 32;
  double learning_rate = 0.05;
  double momentum = 0.9;
  int batch_size = 50;
  int max_epochs = 200;
  int min_epochs = 30;             // fully trained, not stopped at first crossing
  double target_accuracy = 0.95;   // stop once train accuracy reaches this
  double minimum_accuracy = 0.90;  // below this at the cap -> ConvergenceError
};

/// Mini-batch SGD on softmax cross-entropy, then normalization.
MlpModel train(const Dataset& ds, std::uint64_t seed, const TrainConfig& config = {});

/// Scales the parameters into [-1, 1] as described on MlpModel.
MlpModel normalize(const MlpModel& raw);

double accuracy(const MlpModel& model, std::span<const double> x, std::span<const int> y);
double test_accuracy(const MlpModel& model, const Dataset& ds);

/// Storage systems compared by the accuracy experiment.
enum class System { ErrorFree, Unprotected, RoundOnly, RotateOnly, Hybrid };

inline constexpr std::array<System, 5> kAllSystems = {
    System::ErrorFree, System::Unprotected, System::RoundOnly, System::RotateOnly,
    System::Hybrid};

std::string_view to_string(System s) noexcept;
SchemeSet scheme_set(System s) noexcept;

struct InferenceOptions {
  int granularity = 1;
  /// Ablation: run the scheme systems without the sign copy.
  bool sign_protection = true;
  unsigned workers = 1;
};

/// Converts every parameter to binary16, encodes it for `system`, injects
/// faults, decodes, and returns test accuracy. ErrorFree skips the buffer and
/// the fault model (half-precision rounding only).
double infer_through_buffer(const MlpModel& model, const Dataset& ds, System system,
                            const FaultSpec& spec, const InferenceOptions& options = {});

struct SystemAccuracy {
  System system = System::ErrorFree;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation over trials
  std::vector<double> per_trial;
};

struct AccuracyReport {
  int granularity = 1;
  double p = 0.0;
  int trials = 0;
  std::vector<SystemAccuracy> systems;

  const SystemAccuracy& at(System s) const;
};

/// Fault seed for trial t; the same seeds are used for every system.
std::uint64_t trial_seed(std::uint64_t base_seed, int trial) noexcept;

/// Runs `trials` fault trials per system. Trials run in parallel; results do
/// not depend on `options.workers`.
AccuracyReport evaluate_systems(const MlpModel& model, const Dataset& ds,
                                std::span<const System> systems, double p, int trials,
                                std::uint64_t seed, const InferenceOptions& options = {});

}  // namespace mlcw::tinynn
