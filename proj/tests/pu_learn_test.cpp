#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "pugraph/linear.hpp"
#include "pugraph/pu_learn.hpp"
#include "pugraph/synthetic.hpp"
#include "test_util.hpp"

namespace pugraph {
namespace {

class FirstFeatureModel : public ScoredModel {
 public:
  ModelKind kind() const override { return ModelKind::logreg; }
  std::size_t dim() const override { return 1; }
  double score(std::span<const double> x) const override { return x[0]; }
  void write(std::ostream& out) const override { out << "kind first_feature\n"; }
};

Trainer first_feature_trainer() {
  return [](const Matrix&, std::span<const std::uint8_t>, std::uint64_t) -> ModelPtr {
    return std::make_shared<FirstFeatureModel>();
  };
}

// 100 rows: the first 40 are labeled with feature `labeled_value`, the rest
// unlabeled with feature 0.1.
PuDataset stub_data(double labeled_value) {
  PuDataset d;
  d.features.resize(100, 1);
  for (std::size_t i = 0; i < 100; ++i) {
    d.s.push_back(i < 40 ? 1 : 0);
    d.features(static_cast<Eigen::Index>(i), 0) = i < 40 ? labeled_value : 0.1;
  }
  return d;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

TEST(ElkanotoTest, LabelFrequencyIsMeanHoldoutScore) {
  const auto model = fit_elkanoto(first_feature_trainer(), stub_data(0.5), {}, 3);
  EXPECT_DOUBLE_EQ(model->c_hat(), 0.5);
  const std::vector<double> probe{0.2};
  EXPECT_DOUBLE_EQ(model->score(probe), 0.4);
}

TEST(ElkanotoTest, FullLabelFrequencyLeavesScoresUnchanged) {
  const auto model = fit_elkanoto(first_feature_trainer(), stub_data(1.0), {}, 3);
  ASSERT_EQ(model->c_hat(), 1.0);
  for (double x : {0.0, 0.13, 0.5, 0.97}) {
    const std::vector<double> probe{x};
    EXPECT_NEAR(model->score(probe), model->base_score(probe), 1e-9);
  }
}

TEST(ElkanotoTest, ZeroHoldoutScoresAreACalibrationFailure) {
  EXPECT_THROW(fit_elkanoto(first_feature_trainer(), stub_data(0.0), {}, 3), CalibrationError);
}

TEST(ElkanotoTest, TooFewHoldoutPositivesIsRejected) {
  auto d = stub_data(0.5);
  std::fill(d.s.begin() + 10, d.s.end(), 0);  // 10 labeled -> 2 in the holdout
  EXPECT_THROW(fit_elkanoto(first_feature_trainer(), d, {}, 3), DegenerateDataError);
}

TEST(ElkanotoTest, RecoversGeneratorLabelFrequency) {
  BlobSpec spec;
  spec.label_frequency = 0.5;
  const auto d = generate_scar_blobs(spec, 4);
  const auto model = fit_elkanoto(logreg_trainer(), d, {}, 4);
  EXPECT_GE(model->c_hat(), 0.45);
  EXPECT_LE(model->c_hat(), 0.55);
}

TEST(ElkanotoTest, AdaptedScoresPreserveRanking) {
  BlobSpec spec;
  spec.label_frequency = 0.5;
  const auto d = generate_scar_blobs(spec, 5);
  const auto model = fit_elkanoto(logreg_trainer(), d, {}, 5);
  const Matrix probe = 4.0 * Matrix::Random(200, 2);
  std::vector<double> base, adapted;
  for (Eigen::Index i = 0; i < probe.rows(); ++i) {
    base.push_back(model->base_score(row_span(probe, i)));
    adapted.push_back(model->score(row_span(probe, i)));
  }
  // Clipping at 1 can only merge ties among the highest base scores.
  for (std::size_t i = 0; i < base.size(); ++i) {
    for (std::size_t j = 0; j < base.size(); ++j) {
      if (base[i] < base[j]) EXPECT_LE(adapted[i], adapted[j]);
      if (base[i] < base[j] && adapted[j] < 1.0) EXPECT_LT(adapted[i], adapted[j]);
    }
  }
}

TEST(PriorTest, FullLabelFrequencyGivesLabeledFraction) {
  const auto d = stub_data(1.0);
  const auto est = estimate_class_prior(d.features, d.s, 1, first_feature_trainer());
  EXPECT_DOUBLE_EQ(est.prior, 0.4);
}

TEST(PriorTest, RecoversGeneratorPrior) {
  BlobSpec spec;
  spec.prior = 0.3;
  spec.label_frequency = 0.5;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto est = estimate_class_prior(generate_scar_blobs(spec, seed), seed);
    EXPECT_GE(est.prior, 0.24) << seed;
    EXPECT_LE(est.prior, 0.36) << seed;
  }
}

TEST(PriorTest, AllLabeledClipsToOne) {
  PuDataset d;
  d.features = Matrix::Random(20, 2);
  d.s.assign(20, 1);
  EXPECT_EQ(estimate_class_prior(d, 1).prior, 1.0);
}

TEST(BaggingTest, SingleFullRoundEqualsSingleFit) {
  BlobSpec spec;
  const auto d = generate_scar_blobs(spec, 6);
  BaggingConfig cfg;
  cfg.rounds = 1;
  cfg.replacement = false;
  cfg.sample_size = d.size() - d.labeled_count();
  const auto bag = fit_bagging_pu(linear_svm_trainer(), d, cfg, 42);
  const auto single = fit_linear_svm(d.features, d.s, {}, derive_seed(42, 0));
  for (Eigen::Index i = 0; i < d.features.rows(); ++i) {
    EXPECT_NEAR(bag->score(row_span(d.features, i)), single->score(row_span(d.features, i)), 1e-9);
  }
}

TEST(BaggingTest, OversizedDrawWithoutReplacementIsRejected) {
  const auto d = stub_data(0.5);
  BaggingConfig cfg;
  cfg.replacement = false;
  cfg.sample_size = 61;
  EXPECT_THROW(fit_bagging_pu(first_feature_trainer(), d, cfg, 1), SamplingError);
}

TEST(BaggingTest, HiddenPositivesOutscoreNegativesOutOfBag) {
  BlobSpec spec;
  spec.label_frequency = 0.7;
  BaggingConfig cfg;
  cfg.rounds = 30;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto d = generate_scar_blobs(spec, seed);
    const auto bag = fit_bagging_pu(linear_svm_trainer(), d, cfg, seed);
    std::vector<double> hidden, negative;
    for (std::size_t k = 0; k < bag->unlabeled_rows().size(); ++k) {
      ((*d.y)[bag->unlabeled_rows()[k]] ? hidden : negative).push_back(bag->oob_scores()[k]);
    }
    ASSERT_FALSE(hidden.empty());
    EXPECT_GT(mean(hidden), mean(negative)) << seed;
  }
}

TEST(BaggingTest, SameSeedGivesIdenticalEnsemble) {
  BlobSpec spec;
  const auto d = generate_scar_blobs(spec, 7);
  BaggingConfig cfg;
  cfg.rounds = 8;
  const auto a = fit_bagging_pu(linear_svm_trainer(), d, cfg, 9);
  cfg.jobs = 3;
  const auto b = fit_bagging_pu(linear_svm_trainer(), d, cfg, 9);
  EXPECT_EQ(a->oob_scores(), b->oob_scores());
  ASSERT_EQ(a->rounds(), 8u);
  for (Eigen::Index i = 0; i < 50; ++i) EXPECT_EQ(a->score(row_span(d.features, i)), b->score(row_span(d.features, i)));
}

TEST(BaggingTest, DefaultSampleSizeIsPositiveCount) {
  const auto d = stub_data(0.5);
  BaggingConfig cfg;
  cfg.rounds = 2;
  EXPECT_EQ(fit_bagging_pu(first_feature_trainer(), d, cfg, 1)->sample_size(), 40u);
}

TEST(UpuTest, DoubleHingeIdentityHoldsExactly) {
  for (double z : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) {
    EXPECT_EQ(double_hinge_loss(z) - double_hinge_loss(-z), -z) << z;
  }
}

TEST(UpuTest, DoubleHingeMatchesPiecewiseForm) {
  EXPECT_EQ(double_hinge_loss(-3.0), 3.0);
  EXPECT_EQ(double_hinge_loss(0.0), 0.5);
  EXPECT_EQ(double_hinge_loss(0.5), 0.25);
  EXPECT_EQ(double_hinge_loss(2.0), 0.0);
}

TEST(UpuTest, RiskIsUnbiasedForFullyLabeledRisk) {
  // A fixed scorer g(x) = w.x + b evaluated on 100 independent PU draws.
  const Vector w = (Vector(2) << 0.7, -0.3).finished();
  const double b = -0.2;
  BlobSpec spec;
  spec.label_frequency = 0.4;
  std::vector<double> pu, pn;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto d = generate_scar_blobs(spec, 1000 + seed);
    const Vector g = d.features * w + Vector::Constant(d.features.rows(), b);
    std::vector<double> p_margins, all(g.data(), g.data() + g.size());
    double pos_loss = 0.0, neg_loss = 0.0, n_pos = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double gi = g(static_cast<Eigen::Index>(i));
      if (d.s[i]) p_margins.push_back(gi);
      if ((*d.y)[i]) {
        pos_loss += double_hinge_loss(gi);
        n_pos += 1.0;
      } else {
        neg_loss += double_hinge_loss(-gi);
      }
    }
    const double n_neg = static_cast<double>(d.size()) - n_pos;
    pn.push_back(spec.prior * pos_loss / n_pos + (1.0 - spec.prior) * neg_loss / n_neg);
    pu.push_back(upu_risk(p_margins, all, spec.prior));
  }
  double var = 0.0;
  const double m = mean(pu);
  for (double r : pu) var += (r - m) * (r - m);
  const double se = std::sqrt(var / 99.0 / 100.0);
  EXPECT_LE(std::abs(m - mean(pn)), 3.0 * se);
}

TEST(UpuTest, RiskDecreasesDuringTraining) {
  BlobSpec spec;
  const auto d = generate_scar_blobs(spec, 8);
  UpuConfig cfg;
  cfg.prior = spec.prior;
  const auto model = fit_upu(d, cfg, 8);
  ASSERT_EQ(model->risk_log().size(), cfg.epochs);
  const double first = model->risk_log().front();
  EXPECT_LE(model->risk_log().back(), first + 1e-6 * std::abs(first));
}

TEST(UpuTest, RecallsMostPositives) {
  BlobSpec spec;
  const auto d = generate_scar_blobs(spec, 9);
  UpuConfig cfg;
  cfg.prior = spec.prior;
  const auto p = predict(*fit_upu(d, cfg, 9), d.features);
  double hit = 0.0, pos = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if ((*d.y)[i]) {
      pos += 1.0;
      hit += p.labels[i];
    }
  }
  EXPECT_GE(hit / pos, 0.9);
}

TEST(UpuTest, PriorOutsideUnitIntervalIsRejected) {
  const auto d = stub_data(0.5);
  UpuConfig cfg;
  cfg.prior = 1.0;
  EXPECT_THROW(fit_upu(d, cfg, 1), ConfigError);
  cfg.prior = 0.0;
  EXPECT_THROW(fit_upu(d, cfg, 1), ConfigError);
}

TEST(PuFitTest, TrueLabelsAreNeverRead) {
  BlobSpec spec;
  auto with_y = generate_scar_blobs(spec, 10);
  auto without_y = with_y;
  without_y.y.reset();
  with_y.y->assign(with_y.size(), 1);
  BaggingConfig bag;
  bag.rounds = 5;
  const Matrix probe = 3.0 * Matrix::Random(50, 2);
  EXPECT_EQ(score_rows(*fit_elkanoto(logreg_trainer(), with_y, {}, 1), probe),
            score_rows(*fit_elkanoto(logreg_trainer(), without_y, {}, 1), probe));
  EXPECT_EQ(score_rows(*fit_bagging_pu(linear_svm_trainer(), with_y, bag, 1), probe),
            score_rows(*fit_bagging_pu(linear_svm_trainer(), without_y, bag, 1), probe));
  EXPECT_EQ(score_rows(*fit_upu(with_y, {}, 1), probe), score_rows(*fit_upu(without_y, {}, 1), probe));
}

}  // namespace
}  // namespace pugraph
