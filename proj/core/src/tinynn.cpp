#include "mlcw/tinynn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mlcw/errors.hpp"
#include "mlcw/parallel.hpp"
#include "mlcw/random.hpp"

namespace mlcw::tinynn {

Dataset make_dataset(std::uint64_t seed, const DatasetConfig& config) {
  if (config.classes < 2 || config.dim < 1 || config.train_per_class < 1 ||
      config.test_per_class < 1) {
    throw DomainError("make_dataset: invalid configuration");
  }
  Rng rng(seed);
  const auto dim = static_cast<std::size_t>(config.dim);

  std::vector<double> centers(static_cast<std::size_t>(config.classes) * dim);
  for (double& c : centers) c = config.center_scale * rng.normal();

  const auto draw = [&](int per_class, std::vector<double>& x, std::vector<int>& y) {
    const std::size_t n = static_cast<std::size_t>(per_class) * config.classes;
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % config.classes);
    for (std::size_t i = n; i > 1; --i) std::swap(labels[i - 1], labels[rng.below(i)]);
    x.resize(n * dim);
    y = labels;
    for (std::size_t i = 0; i < n; ++i) {
      const double* center = centers.data() + static_cast<std::size_t>(labels[i]) * dim;
      for (std::size_t j = 0; j < dim; ++j) x[i * dim + j] = center[j] + config.noise * rng.normal();
    }
  };

  Dataset ds;
  ds.classes = config.classes;
  ds.dim = config.dim;
  ds.seed = seed;
  draw(config.train_per_class, ds.train_x, ds.train_y);
  draw(config.test_per_class, ds.test_x, ds.test_y);
  return ds;
}

std::vector<double> MlpModel::parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  out.insert(out.end(), w1.begin(), w1.end());
  out.insert(out.end(), b1.begin(), b1.end());
  out.insert(out.end(), w2.begin(), w2.end());
  out.insert(out.end(), b2.begin(), b2.end());
  return out;
}

MlpModel MlpModel::with_parameters(std::span<const double> params) const {
  if (params.size() != parameter_count()) {
    throw DomainError("with_parameters: parameter count mismatch");
  }
  MlpModel m = *this;
  auto it = params.begin();
  for (auto* v : {&m.w1, &m.b1, &m.w2, &m.b2}) {
    std::copy(it, it + static_cast<std::ptrdiff_t>(v->size()), v->begin());
    it += static_cast<std::ptrdiff_t>(v->size());
  }
  return m;
}

void MlpModel::forward(std::span<const double> x, std::span<double> logits) const {
  const auto in = static_cast<std::size_t>(input_dim);
  const auto hid = static_cast<std::size_t>(hidden_dim);
  const auto out = static_cast<std::size_t>(output_dim);
  std::vector<double> hidden(hid);
  for (std::size_t h = 0; h < hid; ++h) {
    double z = b1[h];
    const double* row = w1.data() + h * in;
    for (std::size_t j = 0; j < in; ++j) z += row[j] * x[j];
    hidden[h] = z > 0.0 ? z : 0.0;
  }
  for (std::size_t o = 0; o < out; ++o) {
    double z = 0.0;
    const double* row = w2.data() + o * hid;
    for (std::size_t h = 0; h < hid; ++h) z += row[h] * hidden[h];
    logits[o] = hidden_scale * z + b2[o];
  }
}

int MlpModel::predict(std::span<const double> x) const {
  std::vector<double> logits(static_cast<std::size_t>(output_dim));
  forward(x, logits);
  // NaN logits (possible after faults) never win.
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int o = 0; o < output_dim; ++o) {
    if (logits[o] > best_value) {
      best_value = logits[o];
      best = o;
    }
  }
  return best;
}

double accuracy(const MlpModel& model, std::span<const double> x, std::span<const int> y) {
  if (y.empty()) return 0.0;
  const auto dim = static_cast<std::size_t>(model.input_dim);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    correct += model.predict(x.subspan(i * dim, dim)) == y[i] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(y.size());
}

double test_accuracy(const MlpModel& model, const Dataset& ds) {
  return accuracy(model, ds.test_x, ds.test_y);
}

namespace {

double max_abs(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  for (double v : b) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace

MlpModel normalize(const MlpModel& raw) {
  MlpModel m = raw;
  const double s1 = max_abs(raw.w1, raw.b1);
  const double s2 = max_abs(raw.w2, raw.b2);
  if (s1 > 0.0) {
    for (double& v : m.w1) v /= s1;
    for (double& v : m.b1) v /= s1;
    m.hidden_scale = raw.hidden_scale * s1;
  }
  if (s2 > 0.0) {
    for (double& v : m.w2) v /= s2;
    for (double& v : m.b2) v /= s2;
  }
  m.normalized = true;
  return m;
}

MlpModel train(const Dataset& ds, std::uint64_t seed, const TrainConfig& config) {
  if (ds.train_size() == 0) throw DomainError("train: empty dataset");
  Rng rng(seed);
  const auto in = static_cast<std::size_t>(ds.dim);
  const auto hid = static_cast<std::size_t>(config.hidden);
  const auto out = static_cast<std::size_t>(ds.classes);

  MlpModel m;
  m.input_dim = ds.dim;
  m.hidden_dim = config.hidden;
  m.output_dim = ds.classes;
  m.w1.resize(hid * in);
  m.b1.assign(hid, 0.0);
  m.w2.resize(out * hid);
  m.b2.assign(out, 0.0);
  const double he1 = std::sqrt(2.0 / static_cast<double>(in));
  const double he2 = std::sqrt(2.0 / static_cast<double>(hid));
  for (double& v : m.w1) v = he1 * rng.normal();
  for (double& v : m.w2) v = he2 * rng.normal();

  std::vector<double> vw1(m.w1.size()), vb1(hid), vw2(m.w2.size()), vb2(out);
  std::vector<double> gw1(m.w1.size()), gb1(hid), gw2(m.w2.size()), gb2(out);
  std::vector<double> z1(hid), a1(hid), logits(out), dz2(out), dz1(hid);

  std::vector<std::size_t> order(ds.train_size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  double train_acc = 0.0;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      std::fill(gw1.begin(), gw1.end(), 0.0);
      std::fill(gb1.begin(), gb1.end(), 0.0);
      std::fill(gw2.begin(), gw2.end(), 0.0);
      std::fill(gb2.begin(), gb2.end(), 0.0);

      for (std::size_t b = start; b < end; ++b) {
        const std::size_t idx = order[b];
        const double* x = ds.train_x.data() + idx * in;
        for (std::size_t h = 0; h < hid; ++h) {
          double z = m.b1[h];
          for (std::size_t j = 0; j < in; ++j) z += m.w1[h * in + j] * x[j];
          z1[h] = z;
          a1[h] = z > 0.0 ? z : 0.0;
        }
        double peak = -std::numeric_limits<double>::infinity();
        for (std::size_t o = 0; o < out; ++o) {
          double z = m.b2[o];
          for (std::size_t h = 0; h < hid; ++h) z += m.w2[o * hid + h] * a1[h];
          logits[o] = z;
          peak = std::max(peak, z);
        }
        double denom = 0.0;
        for (std::size_t o = 0; o < out; ++o) denom += std::exp(logits[o] - peak);
        for (std::size_t o = 0; o < out; ++o) {
          dz2[o] = std::exp(logits[o] - peak) / denom;
        }
        dz2[static_cast<std::size_t>(ds.train_y[idx])] -= 1.0;

        std::fill(dz1.begin(), dz1.end(), 0.0);
        for (std::size_t o = 0; o < out; ++o) {
          gb2[o] += dz2[o];
          for (std::size_t h = 0; h < hid; ++h) {
            gw2[o * hid + h] += dz2[o] * a1[h];
            dz1[h] += m.w2[o * hid + h] * dz2[o];
          }
        }
        for (std::size_t h = 0; h < hid; ++h) {
          if (z1[h] <= 0.0) continue;
          gb1[h] += dz1[h];
          for (std::size_t j = 0; j < in; ++j) gw1[h * in + j] += dz1[h] * x[j];
        }
      }

      const double scale = config.learning_rate / static_cast<double>(end - start);
      const auto step = [&](std::vector<double>& param, std::vector<double>& vel,
                            const std::vector<double>& grad) {
        for (std::size_t k = 0; k < param.size(); ++k) {
          vel[k] = config.momentum * vel[k] - scale * grad[k];
          param[k] += vel[k];
        }
      };
      step(m.w1, vw1, gw1);
      step(m.b1, vb1, gb1);
      step(m.w2, vw2, gw2);
      step(m.b2, vb2, gb2);
    }

    train_acc = accuracy(m, ds.train_x, ds.train_y);
    if (epoch + 1 >= config.min_epochs && train_acc >= config.target_accuracy) break;
  }
  if (train_acc < config.minimum_accuracy) {
    throw ConvergenceError("train: accuracy " + std::to_string(train_acc) +
                           " below minimum at the epoch cap");
  }
  return normalize(m);
}

std::string_view to_string(System s) noexcept {
  switch (s) {
    case System::ErrorFree: return "error_free";
    case System::Unprotected: return "unprotected";
    case System::RoundOnly: return "round";
    case System::RotateOnly: return "rotate";
    case System::Hybrid: return "hybrid";
  }
  return "?";
}

SchemeSet scheme_set(System s) noexcept {
  switch (s) {
    case System::ErrorFree: return SchemeSet{Scheme::NoChange};
    case System::Unprotected: return SchemeSet::unprotected();
    case System::RoundOnly: return SchemeSet{Scheme::NoChange, Scheme::Round};
    case System::RotateOnly: return SchemeSet{Scheme::NoChange, Scheme::Rotate};
    case System::Hybrid: return SchemeSet::hybrid();
  }
  return SchemeSet::hybrid();
}

double infer_through_buffer(const MlpModel& model, const Dataset& ds, System system,
                            const FaultSpec& spec, const InferenceOptions& options) {
  if (!model.normalized) throw DomainError("infer_through_buffer: model is not normalized");
  const std::vector<double> params = model.parameters();
  std::vector<HalfWord> halves(params.size());
  std::transform(params.begin(), params.end(), halves.begin(),
                 [](double v) { return real_to_half(v); });

  std::vector<HalfWord> restored;
  if (system == System::ErrorFree) {
    restored = std::move(halves);
  } else {
    EncodeOptions enc;
    enc.granularity = options.granularity;
    enc.enabled = scheme_set(system);
    enc.duplicate_sign = options.sign_protection;
    enc.workers = options.workers;
    const EncodedBuffer stored = encode_buffer(halves, enc);
    const EncodedBuffer faulty = inject_faults(stored, spec, nullptr, options.workers);
    restored = decode_buffer(faulty, nullptr, options.workers);
  }

  std::vector<double> values(restored.size());
  std::transform(restored.begin(), restored.end(), values.begin(),
                 [](HalfWord h) { return half_to_real(h); });
  return test_accuracy(model.with_parameters(values), ds);
}

const SystemAccuracy& AccuracyReport::at(System s) const {
  for (const auto& entry : systems) {
    if (entry.system == s) return entry;
  }
  throw DomainError("AccuracyReport: system not evaluated");
}

std::uint64_t trial_seed(std::uint64_t base_seed, int trial) noexcept {
  return counter_hash(base_seed, 3, static_cast<std::uint64_t>(trial));
}

AccuracyReport evaluate_systems(const MlpModel& model, const Dataset& ds,
                                std::span<const System> systems, double p, int trials,
                                std::uint64_t seed, const InferenceOptions& options) {
  if (trials < 1) throw DomainError("evaluate_systems: trials must be >= 1");
  FaultSpec{p, 0}.validate();
  if (!is_valid_granularity(options.granularity)) {
    throw DomainError("granularity must be one of 1, 2, 4, 8, 16");
  }

  const auto n_trials = static_cast<std::size_t>(trials);
  std::vector<double> results(systems.size() * n_trials);
  InferenceOptions inner = options;
  inner.workers = 1;
  for_each_chunk(results.size(), 1, options.workers,
                 [&](std::size_t, std::size_t begin, std::size_t end) {
                   for (std::size_t task = begin; task < end; ++task) {
                     const System system = systems[task / n_trials];
                     const int trial = static_cast<int>(task % n_trials);
                     results[task] = infer_through_buffer(
                         model, ds, system, FaultSpec{p, trial_seed(seed, trial)}, inner);
                   }
                 });

  AccuracyReport report;
  report.granularity = options.granularity;
  report.p = p;
  report.trials = trials;
  for (std::size_t s = 0; s < systems.size(); ++s) {
    SystemAccuracy entry;
    entry.system = systems[s];
    entry.per_trial.assign(results.begin() + static_cast<std::ptrdiff_t>(s * n_trials),
                           results.begin() + static_cast<std::ptrdiff_t>((s + 1) * n_trials));
    const double sum = std::accumulate(entry.per_trial.begin(), entry.per_trial.end(), 0.0);
    entry.mean = sum / static_cast<double>(n_trials);
    double ss = 0.0;
    for (double a : entry.per_trial) ss += (a - entry.mean) * (a - entry.mean);
    entry.stddev = n_trials > 1 ? std::sqrt(ss / static_cast<double>(n_trials - 1)) : 0.0;
    report.systems.push_back(std::move(entry));
  }
  return report;
}

}  // namespace mlcw::tinynn
