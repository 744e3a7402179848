#include <vector>

#include <gtest/gtest.h>

#include "pugraph/linear.hpp"
#include "pugraph/metrics.hpp"
#include "pugraph/synthetic.hpp"

namespace pugraph {
namespace {

using Labels = std::vector<std::uint8_t>;

TEST(StandardMetricsTest, PerfectPredictionsScoreOne) {
  const Labels y{1, 0, 1, 1, 0};
  const auto r = standard_metrics(y, y);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 1.0);
  EXPECT_EQ(r.f1, 1.0);
}

TEST(StandardMetricsTest, CountedConfusionTable) {
  // 8 TP, 2 FP, 2 FN, 88 TN.
  Labels pred, ref;
  auto add = [&](int n, std::uint8_t p, std::uint8_t t) {
    for (int i = 0; i < n; ++i) {
      pred.push_back(p);
      ref.push_back(t);
    }
  };
  add(8, 1, 1);
  add(2, 1, 0);
  add(2, 0, 1);
  add(88, 0, 0);
  const auto r = standard_metrics(pred, ref);
  EXPECT_EQ(r.tp, 8u);
  EXPECT_EQ(r.fp, 2u);
  EXPECT_EQ(r.fn, 2u);
  EXPECT_EQ(r.tn, 88u);
  EXPECT_DOUBLE_EQ(r.precision, 0.8);
  EXPECT_DOUBLE_EQ(r.recall, 0.8);
  EXPECT_DOUBLE_EQ(r.f1, 0.8);
  EXPECT_DOUBLE_EQ(r.positive_prediction_rate, 0.1);
}

TEST(StandardMetricsTest, AllNegativePredictionsAreZeroNotNan) {
  const Labels pred(10, 0);
  const Labels ref{1, 1, 0, 0, 0, 0, 0, 0, 0, 0};
  const auto r = standard_metrics(pred, ref);
  EXPECT_EQ(r.precision, 0.0);
  EXPECT_EQ(r.recall, 0.0);
  EXPECT_EQ(r.f1, 0.0);
  EXPECT_EQ(r.puf1, 0.0);
}

TEST(StandardMetricsTest, LengthMismatchIsRejected) {
  EXPECT_THROW(standard_metrics(Labels{1, 0}, Labels{1}), DimensionError);
}

TEST(Puf1Test, PerfectRecallAtHalfRateIsTwo) {
  const Labels s{1, 1, 0, 0};
  const Labels pred{1, 1, 0, 0};
  EXPECT_EQ(puf1(pred, s), 2.0);
}

TEST(Puf1Test, CountedFixtureIsOnePointSix) {
  // 10 labeled positives, 8 of them predicted positive; 40 positive
  // predictions among 100 points.
  Labels s(100, 0), pred(100, 0);
  for (int i = 0; i < 10; ++i) s[i] = 1;
  for (int i = 0; i < 8; ++i) pred[i] = 1;
  for (int i = 10; i < 42; ++i) pred[i] = 1;
  EXPECT_EQ(puf1(pred, s), 1.6);
  EXPECT_EQ(standard_metrics(pred, s).puf1, 1.6);
}

TEST(Puf1Test, AllPositivePredictorScoresOne) {
  const Labels s{1, 0, 0, 1, 0};
  EXPECT_EQ(puf1(Labels(5, 1), s), 1.0);
}

TEST(Puf1Test, PreciseClassifierBeatsAllPositive) {
  const Labels s{1, 1, 0, 0, 0, 0, 0, 0, 0, 0};
  EXPECT_GT(puf1(s, s), puf1(Labels(10, 1), s));
}

TEST(Puf1Test, UndefinedWithoutLabeledPositives) {
  EXPECT_THROW(puf1(Labels{1, 0}, Labels{0, 0}), UndefinedMetricError);
  EXPECT_THROW(puf1(Labels{}, Labels{}), UndefinedMetricError);
}

TEST(Puf1Test, NoPositivePredictionsIsZero) { EXPECT_EQ(puf1(Labels{0, 0}, Labels{1, 0}), 0.0); }

TEST(EstimatedVsDefactoTest, IdenticalWithoutHiddenPositives) {
  const Labels s{1, 0, 1, 0, 0, 1};
  const Labels pred{1, 1, 0, 0, 0, 1};
  const auto [est, def] = estimated_vs_defacto(pred, s, s);
  EXPECT_EQ(est.precision, def.precision);
  EXPECT_EQ(est.recall, def.recall);
  EXPECT_EQ(est.f1, def.f1);
  EXPECT_EQ(est.puf1, def.puf1);
  EXPECT_EQ(est.variant, MetricVariant::estimated);
  EXPECT_EQ(def.variant, MetricVariant::defacto);
}

TEST(EstimatedVsDefactoTest, HiddenPositivesHandTable) {
  // 10 true positives (2 of them hidden), 10 negatives; the classifier is
  // right about every point.
  Labels y(20, 0), s(20, 0);
  for (int i = 0; i < 10; ++i) y[i] = 1;
  for (int i = 0; i < 8; ++i) s[i] = 1;
  const Labels pred = y;
  const auto [est, def] = estimated_vs_defacto(pred, s, y);
  EXPECT_DOUBLE_EQ(est.precision, 8.0 / 10.0);
  EXPECT_EQ(def.precision, 1.0);
  EXPECT_EQ(est.recall, 1.0);
  EXPECT_EQ(def.recall, 1.0);
}

TEST(EstimatedVsDefactoTest, TwelvePredictionsFixture) {
  // 10 labeled positives and 2 hidden positives predicted positive, plus 10
  // negatives predicted negative: estimated precision 10/12.
  Labels y(22, 0), s(22, 0), pred(22, 0);
  for (int i = 0; i < 12; ++i) y[i] = pred[i] = 1;
  for (int i = 0; i < 10; ++i) s[i] = 1;
  const auto [est, def] = estimated_vs_defacto(pred, s, y);
  EXPECT_NEAR(est.precision, 10.0 / 12.0, 1e-15);
  EXPECT_EQ(def.precision, 1.0);
  EXPECT_EQ(est.recall, 1.0);
  EXPECT_EQ(def.recall, 1.0);
}

TEST(EstimatedVsDefactoTest, MissingTrueLabelsIsAnError) {
  EXPECT_THROW(estimated_vs_defacto(Labels{1}, Labels{1}, std::nullopt), UndefinedMetricError);
}

TEST(EstimatedVsDefactoTest, DefactoPrecisionNeverBelowEstimated) {
  Rng rng = make_rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    Labels y(30), s(30), pred(30);
    for (int i = 0; i < 30; ++i) {
      y[i] = uniform_index(rng, 2);
      s[i] = y[i] && uniform_index(rng, 2);
      pred[i] = uniform_index(rng, 2);
    }
    const auto [est, def] = estimated_vs_defacto(pred, s, y);
    EXPECT_GE(def.precision, est.precision);
  }
}

TEST(EstimatedVsDefactoTest, LabeledRecallTracksTrueRecallUnderScar) {
  BlobSpec spec;
  double gap = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = generate_scar_blobs(spec, seed);
    const auto pred = predict(*fit_logreg(d, {}, seed), d.features);
    const auto [est, def] = estimated_vs_defacto(pred.labels, d.s, d.y);
    gap += std::abs(est.recall - def.recall);
  }
  EXPECT_LE(gap / 20.0, 0.05);
}

TEST(EstimatedVsDefactoTest, MetricInvariantsHold) {
  Rng rng = make_rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    Labels ref(25), pred(25);
    for (int i = 0; i < 25; ++i) {
      ref[i] = uniform_index(rng, 2);
      pred[i] = uniform_index(rng, 2);
    }
    const auto r = standard_metrics(pred, ref);
    for (double v : {r.precision, r.recall, r.f1}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    if (r.precision + r.recall > 0.0) EXPECT_NEAR(r.f1, 2 * r.precision * r.recall / (r.precision + r.recall), 1e-15);
    if (r.positive_prediction_rate > 0.0) EXPECT_LE(r.puf1, 1.0 / r.positive_prediction_rate + 1e-12);
  }
}

}  // namespace
}  // namespace pugraph
