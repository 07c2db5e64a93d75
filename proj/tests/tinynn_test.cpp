#include "mlcw/tinynn.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "mlcw/csv.hpp"
#include "mlcw/errors.hpp"
#include "mlcw/random.hpp"

namespace mlcw::tinynn {
namespace {

class TinyNnTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dataset_ = new Dataset(make_dataset(1));
    model_ = new MlpModel(train(*dataset_, 2));
  }
  static void TearDownTestSuite() {
    delete model_;
    delete dataset_;
  }
  static Dataset* dataset_;
  static MlpModel* model_;
};

Dataset* TinyNnTest::dataset_ = nullptr;
MlpModel* TinyNnTest::model_ = nullptr;

TEST(DatasetTest, Deterministic) {
  const Dataset a = make_dataset(7);
  const Dataset b = make_dataset(7);
  EXPECT_EQ(a.train_x, b.train_x);
  EXPECT_EQ(a.train_y, b.train_y);
  EXPECT_EQ(a.test_x, b.test_x);
  EXPECT_NE(make_dataset(8).train_x, a.train_x);
}

TEST(DatasetTest, ShapeAndBalance) {
  const Dataset ds = make_dataset(3);
  EXPECT_EQ(ds.train_size(), 2000U);
  EXPECT_EQ(ds.test_size(), 500U);
  EXPECT_EQ(ds.train_x.size(), 2000U * 64U);
  std::vector<int> hist(10, 0);
  for (int y : ds.train_y) ++hist.at(static_cast<std::size_t>(y));
  for (int c : hist) EXPECT_NEAR(c, 200, 1);
}

TEST(DatasetTest, LinearlySeparableEnough) {
  // Nearest-centroid is a linear classifier; it must clear 90% on the test split.
  const Dataset ds = make_dataset(1);
  const auto d = static_cast<std::size_t>(ds.dim);
  std::vector<double> centroid(10 * d, 0.0);
  std::vector<int> n(10, 0);
  for (std::size_t i = 0; i < ds.train_size(); ++i) {
    const auto y = static_cast<std::size_t>(ds.train_y[i]);
    ++n[y];
    for (std::size_t j = 0; j < d; ++j) centroid[y * d + j] += ds.train_x[i * d + j];
  }
  for (std::size_t c = 0; c < 10; ++c) {
    for (std::size_t j = 0; j < d; ++j) centroid[c * d + j] /= n[c];
  }
  int correct = 0;
  for (std::size_t i = 0; i < ds.test_size(); ++i) {
    double best = INFINITY;
    int arg = 0;
    for (std::size_t c = 0; c < 10; ++c) {
      double dist = 0;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = ds.test_x[i * d + j] - centroid[c * d + j];
        dist += diff * diff;
      }
      if (dist < best) {
        best = dist;
        arg = static_cast<int>(c);
      }
    }
    correct += arg == ds.test_y[i];
  }
  EXPECT_GT(correct / 500.0, 0.90);
}

TEST_F(TinyNnTest, ParametersNormalized) {
  EXPECT_TRUE(model_->normalized);
  double peak = 0;
  for (double v : model_->parameters()) {
    ASSERT_LE(std::fabs(v), 1.0);
    peak = std::max(peak, std::fabs(v));
  }
  EXPECT_EQ(peak, 1.0);
  EXPECT_GT(model_->hidden_scale, 0.0);
}

TEST_F(TinyNnTest, ErrorFreeAccuracy) {
  EXPECT_GE(test_accuracy(*model_, *dataset_), 0.90);
  EXPECT_GE(infer_through_buffer(*model_, *dataset_, System::ErrorFree, FaultSpec{0.0, 0}),
            0.90);
}

TEST_F(TinyNnTest, TrainingIsDeterministic) {
  EXPECT_EQ(train(*dataset_, 2), *model_);
}

TEST_F(TinyNnTest, LosslessPipelineIsTransparent) {
  const double reference =
      infer_through_buffer(*model_, *dataset_, System::ErrorFree, FaultSpec{0.0, 0});
  for (int g : kGranularities) {
    InferenceOptions options;
    options.granularity = g;
    EXPECT_EQ(infer_through_buffer(*model_, *dataset_, System::RotateOnly, FaultSpec{0.0, 1},
                                   options),
              reference);
    EXPECT_EQ(infer_through_buffer(*model_, *dataset_, System::Unprotected, FaultSpec{0.0, 1},
                                   options),
              reference);
  }
}

TEST_F(TinyNnTest, UnprotectedCollapsesUnderFaults) {
  const double clean =
      infer_through_buffer(*model_, *dataset_, System::ErrorFree, FaultSpec{0.0, 0});
  const double faulty =
      infer_through_buffer(*model_, *dataset_, System::Unprotected, FaultSpec{0.02, 5});
  EXPECT_LT(faulty, clean - 0.1);
}

TEST_F(TinyNnTest, EvaluateSystemsIsDeterministicAcrossWorkers) {
  InferenceOptions serial;
  InferenceOptions parallel;
  parallel.workers = 4;
  const auto a = evaluate_systems(*model_, *dataset_, kAllSystems, 0.02, 4, 9, serial);
  const auto b = evaluate_systems(*model_, *dataset_, kAllSystems, 0.02, 4, 9, parallel);
  EXPECT_EQ(accuracy_csv(a), accuracy_csv(b));
  for (const auto& s : a.systems) {
    EXPECT_GE(s.mean, 0.0);
    EXPECT_LE(s.mean, 1.0);
  }
  EXPECT_EQ(a.at(System::ErrorFree).stddev, 0.0);
}

TEST_F(TinyNnTest, SignProtectionAblation) {
  InferenceOptions off;
  off.sign_protection = false;
  const double with = infer_through_buffer(*model_, *dataset_, System::Hybrid, FaultSpec{0.02, 3});
  const double without =
      infer_through_buffer(*model_, *dataset_, System::Hybrid, FaultSpec{0.02, 3}, off);
  EXPECT_GT(with, without);
}

TEST(NormalizeTest, PreservesPredictions) {
  const Dataset ds = make_dataset(4);
  MlpModel raw;
  raw.input_dim = ds.dim;
  raw.hidden_dim = 8;
  raw.output_dim = ds.classes;
  Rng rng(1);
  raw.w1.resize(8 * 64);
  raw.b1.resize(8);
  raw.w2.resize(10 * 8);
  raw.b2.resize(10);
  for (auto* v : {&raw.w1, &raw.b1, &raw.w2, &raw.b2}) {
    for (double& x : *v) x = 3.0 * rng.normal();
  }
  const MlpModel norm = normalize(raw);
  const auto d = static_cast<std::size_t>(ds.dim);
  for (std::size_t i = 0; i < ds.test_size(); ++i) {
    const auto x = std::span<const double>(ds.test_x).subspan(i * d, d);
    ASSERT_EQ(raw.predict(x), norm.predict(x));
  }
}

TEST(TrainTest, ConvergenceErrorAtCap) {
  DatasetConfig hard;
  hard.center_scale = 0.0;  // all classes share one center
  const Dataset ds = make_dataset(5, hard);
  TrainConfig cfg;
  cfg.max_epochs = 2;
  cfg.min_epochs = 0;
  EXPECT_THROW(train(ds, 1, cfg), ConvergenceError);
}

TEST(InferenceTest, RejectsUnnormalizedModel) {
  const Dataset ds = make_dataset(6);
  MlpModel m;
  EXPECT_THROW(infer_through_buffer(m, ds, System::Hybrid, FaultSpec{}), DomainError);
}

}  // namespace
}  // namespace mlcw::tinynn
