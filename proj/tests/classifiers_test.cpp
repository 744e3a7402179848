#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "pugraph/forest.hpp"
#include "pugraph/linear.hpp"
#include "pugraph/model_io.hpp"
#include "pugraph/pu_learn.hpp"
#include "pugraph/synthetic.hpp"
#include "test_util.hpp"

namespace pugraph {
namespace {

// Two unit-variance blobs centred at -2 and +2 on the first axis, balanced.
PuDataset separable_blobs(std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  PuDataset d;
  d.features.resize(static_cast<Eigen::Index>(n), 2);
  d.s.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.s[i] = i % 2;
    d.features(static_cast<Eigen::Index>(i), 0) = standard_normal(rng) + (d.s[i] ? 2.0 : -2.0);
    d.features(static_cast<Eigen::Index>(i), 1) = standard_normal(rng);
  }
  return d;
}

// Four quadrant clusters labelled by the sign of x0 * x1. Every point comes
// with its reflection through the origin, so the best linear fit has w = 0.
PuDataset xor_data(std::size_t pairs, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  PuDataset d;
  d.features.resize(static_cast<Eigen::Index>(2 * pairs), 2);
  d.s.resize(2 * pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    const double sx = uniform_index(rng, 2) ? 1.0 : -1.0;
    const double sy = uniform_index(rng, 2) ? 1.0 : -1.0;
    const double x = sx * (0.5 + uniform_unit(rng));
    const double y = sy * (0.5 + uniform_unit(rng));
    for (std::size_t k = 0; k < 2; ++k) {
      const auto row = static_cast<Eigen::Index>(2 * i + k);
      d.features(row, 0) = k ? -x : x;
      d.features(row, 1) = k ? -y : y;
      d.s[2 * i + k] = sx * sy > 0 ? 1 : 0;
    }
  }
  return d;
}

double accuracy(const ScoredModel& model, const PuDataset& d) {
  const auto p = predict(model, d.features);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < d.size(); ++i) hits += p.labels[i] == d.s[i];
  return static_cast<double>(hits) / static_cast<double>(d.size());
}

// Scores the first feature directly; lets PU wrappers be checked by hand.
class FirstFeatureModel : public ScoredModel {
 public:
  ModelKind kind() const override { return ModelKind::logreg; }
  std::size_t dim() const override { return 1; }
  double score(std::span<const double> x) const override { return x[0]; }
  void write(std::ostream& out) const override { out << "kind first_feature\n"; }
};

std::vector<std::pair<std::string, Trainer>> all_trainers() {
  ForestConfig forest;
  forest.n_trees = 20;
  BaggingConfig bagging;
  bagging.rounds = 10;
  UpuConfig upu;
  upu.prior = 0.5;
  return {{"logreg", logreg_trainer()},
          {"svm", linear_svm_trainer()},
          {"forest", random_forest_trainer(forest)},
          {"elkanoto", elkanoto_trainer(logreg_trainer())},
          {"bagging", bagging_pu_trainer(linear_svm_trainer(), bagging)},
          {"upu", upu_trainer(upu)}};
}

TEST(LogRegTest, SeparableBlobsReachHighAccuracy) {
  const auto d = separable_blobs(400, 1);
  EXPECT_GE(accuracy(*fit_logreg(d, {}, 7), d), 0.95);
}

TEST(LogRegTest, IdenticalFeaturesGiveHalfScore) {
  PuDataset d;
  d.features = Matrix::Constant(200, 3, 1.5);
  for (std::size_t i = 0; i < 200; ++i) d.s.push_back(i % 2);
  const auto model = fit_logreg(d, {}, 3);
  for (double s : score_rows(*model, d.features)) EXPECT_NEAR(s, 0.5, 0.05);
}

TEST(LogRegTest, SingleClassIsRejected) {
  PuDataset d;
  d.features = Matrix::Random(10, 2);
  d.s.assign(10, 1);
  EXPECT_THROW(fit_logreg(d, {}, 1), DegenerateDataError);
  d.s.assign(10, 0);
  EXPECT_THROW(fit_linear_svm(d, {}, 1), DegenerateDataError);
  EXPECT_THROW(fit_random_forest(d, {}, 1), DegenerateDataError);
}

TEST(LinearSvmTest, SeparableBlobsReachHighAccuracy) {
  const auto d = separable_blobs(400, 2);
  EXPECT_GE(accuracy(*fit_linear_svm(d, {}, 7), d), 0.95);
}

TEST(LinearSvmTest, MarginSignFlipsWithLabels) {
  auto d = separable_blobs(300, 3);
  const auto model = fit_linear_svm(d, {}, 11);
  for (auto& s : d.s) s = 1 - s;
  const auto flipped = fit_linear_svm(d, {}, 11);
  for (Eigen::Index i = 0; i < d.features.rows(); ++i) {
    EXPECT_EQ(model->margin(row_span(d.features, i)), -flipped->margin(row_span(d.features, i)));
  }
}

TEST(LinearSvmTest, CalibratedScoresIncreaseWithMargin) {
  const auto d = separable_blobs(400, 4);
  const auto model = fit_linear_svm(d, {}, 5);
  EXPECT_LT(model->link().a, 0.0);
}

TEST(RandomForestTest, LearnsXorWhereLinearModelsCannot) {
  const auto train = xor_data(300, 5);
  const auto test = xor_data(200, 6);
  EXPECT_GE(accuracy(*fit_random_forest(train, {}, 9), test), 0.9);
  EXPECT_NEAR(accuracy(*fit_logreg(train, {}, 9), test), 0.5, 0.1);
  EXPECT_NEAR(accuracy(*fit_linear_svm(train, {}, 9), test), 0.5, 0.1);
}

TEST(RandomForestTest, SingleStumpIsConstantMajorityVote) {
  PuDataset d;
  d.features = Matrix::Random(100, 2);
  for (std::size_t i = 0; i < 100; ++i) d.s.push_back(i < 80 ? 1 : 0);
  ForestConfig cfg;
  cfg.n_trees = 1;
  cfg.max_depth = 0;
  const auto model = fit_random_forest(d, cfg, 2);
  ASSERT_EQ(model->trees().front().nodes().size(), 1u);
  for (double s : score_rows(*model, d.features)) EXPECT_EQ(s, 1.0);
}

TEST(RandomForestTest, MeanScoreStableAcrossSeeds) {
  const auto d = separable_blobs(300, 7);
  ForestConfig cfg;
  cfg.n_trees = 50;
  std::vector<double> means;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto scores = score_rows(*fit_random_forest(d, cfg, seed), d.features);
    means.push_back(std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size()));
  }
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / 10.0;
  for (double m : means) EXPECT_NEAR(m, grand, 0.05);
}

TEST(RandomForestTest, ParallelFitMatchesSequential) {
  const auto d = xor_data(100, 8);
  ForestConfig cfg;
  cfg.n_trees = 16;
  const auto seq = fit_random_forest(d, cfg, 4);
  cfg.jobs = 4;
  const auto par = fit_random_forest(d, cfg, 4);
  EXPECT_EQ(score_rows(*seq, d.features), score_rows(*par, d.features));
}

TEST(PredictTest, EmptyInputGivesEmptyOutput) {
  const auto model = fit_logreg(separable_blobs(50, 1), {}, 1);
  const auto p = predict(*model, Matrix(0, 2));
  EXPECT_TRUE(p.scores.empty());
  EXPECT_TRUE(p.labels.empty());
}

TEST(PredictTest, ThresholdZeroMarksEverythingPositive) {
  const auto d = separable_blobs(100, 2);
  const auto p = predict(*fit_logreg(d, {}, 1), d.features, 0.0);
  EXPECT_EQ(std::count(p.labels.begin(), p.labels.end(), 1), 100);
}

TEST(PredictTest, DimensionMismatchIsRejected) {
  const auto model = fit_logreg(separable_blobs(50, 1), {}, 1);
  EXPECT_THROW(predict(*model, Matrix::Zero(4, 3)), DimensionError);
}

TEST(PredictTest, ElkanotoScoresMatchHandComputation) {
  const ElkanotoModel model(std::make_shared<FirstFeatureModel>(), 0.5);
  Matrix x(3, 1);
  x << 0.1, 0.3, 0.6;
  const auto scores = score_rows(model, x);
  EXPECT_NEAR(scores[0], 0.2, 1e-12);
  EXPECT_NEAR(scores[1], 0.6, 1e-12);
  EXPECT_EQ(scores[2], 1.0);
}

TEST(PredictTest, EveryModelScoresInUnitInterval) {
  const auto d = separable_blobs(200, 9);
  Matrix probe = 10.0 * Matrix::Random(100, 2);
  for (const auto& [name, trainer] : all_trainers()) {
    const auto model = trainer(d.features, d.s, 3);
    for (double s : score_rows(*model, probe)) {
      EXPECT_GE(s, 0.0) << name;
      EXPECT_LE(s, 1.0) << name;
    }
  }
}

TEST(PredictTest, RaisingThresholdNeverAddsPositives) {
  const auto d = separable_blobs(200, 10);
  for (const auto& [name, trainer] : all_trainers()) {
    const auto scores = score_rows(*trainer(d.features, d.s, 3), d.features);
    std::size_t previous = scores.size() + 1;
    for (double t = 0.0; t <= 1.0; t += 0.05) {
      const auto labels = apply_threshold(scores, t);
      const auto count = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
      EXPECT_LE(count, previous) << name << " t=" << t;
      previous = count;
    }
  }
}

TEST(PredictTest, FitsAreDeterministicPerSeed) {
  const auto d = separable_blobs(200, 11);
  for (const auto& [name, trainer] : all_trainers()) {
    EXPECT_EQ(score_rows(*trainer(d.features, d.s, 5), d.features), score_rows(*trainer(d.features, d.s, 5), d.features))
        << name;
  }
}

TEST(ModelIoTest, EveryModelRoundTrips) {
  const auto d = separable_blobs(200, 12);
  Matrix probe = 3.0 * Matrix::Random(50, 2);
  for (const auto& [name, trainer] : all_trainers()) {
    const auto model = trainer(d.features, d.s, 3);
    std::stringstream buffer;
    save_model(*model, buffer);
    const auto loaded = load_model(buffer);
    EXPECT_EQ(loaded->kind(), model->kind()) << name;
    const auto a = score_rows(*model, probe);
    const auto b = score_rows(*loaded, probe);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12) << name;
  }
}

TEST(ModelIoTest, FileRoundTripAndBadHeader) {
  testing::TempDir dir;
  const auto model = fit_logreg(separable_blobs(50, 1), {}, 1);
  save_model(*model, dir.path() / "m.txt");
  EXPECT_EQ(load_model(dir.path() / "m.txt")->kind(), ModelKind::logreg);
  std::stringstream bad("not-a-model 1\n");
  EXPECT_THROW(load_model(bad), IoError);
}

TEST(ModelKindTest, NamesRoundTrip) {
  for (auto k : {ModelKind::logreg, ModelKind::linear_svm, ModelKind::random_forest, ModelKind::bagging_pu,
                 ModelKind::elkanoto, ModelKind::upu}) {
    EXPECT_EQ(parse_model_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_model_kind("gbm"), ConfigError);
}

}  // namespace
}  // namespace pugraph
