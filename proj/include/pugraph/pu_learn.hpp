#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "pugraph/dataset.hpp"
#include "pugraph/linear.hpp"
#include "pugraph/model.hpp"
#include "pugraph/parallel.hpp"
#include "pugraph/rng.hpp"

namespace pugraph {

// ---------------------------------------------------------------------------
// Elkan-Noto: under SCAR, Pr(s=1|x) = c * Pr(y=1|x), so a classifier of
// labeled-vs-unlabeled divided by the label frequency c scores true
// positives. c is estimated as the mean score of held-out labeled rows.
// ---------------------------------------------------------------------------

class ElkanotoModel : public ScoredModel {
 public:
  ElkanotoModel(ModelPtr base, double c_hat) : base_(std::move(base)), c_hat_(c_hat) {
    if (!(c_hat_ > 0.0 && c_hat_ <= 1.0)) throw CalibrationError("label frequency estimate outside (0, 1]");
  }

  ModelKind kind() const override { return ModelKind::elkanoto; }
  std::size_t dim() const override { return base_->dim(); }
  double score(std::span<const double> x) const override { return std::min(1.0, base_->score(x) / c_hat_); }

  double base_score(std::span<const double> x) const { return base_->score(x); }
  double c_hat() const { return c_hat_; }
  const ModelPtr& base() const { return base_; }

  void write(std::ostream& out) const override {
    out << "kind elkanoto\nc_hat " << c_hat_ << '\n';
    base_->write(out);
  }

 private:
  ModelPtr base_;
  double c_hat_;
};

struct ElkanotoConfig {
  double holdout_fraction = 0.2;
  std::size_t min_holdout_positives = 5;
};

inline std::shared_ptr<const ElkanotoModel> fit_elkanoto(const Trainer& base_trainer, const Matrix& features,
                                                         std::span<const std::uint8_t> s, const ElkanotoConfig& cfg,
                                                         std::uint64_t seed) {
  require_rows_match(features, s);
  if (!(cfg.holdout_fraction > 0.0 && cfg.holdout_fraction < 1.0)) {
    throw ConfigError("holdout_fraction", "must lie in (0, 1)");
  }
  const auto split = stratified_split(s, 1.0 - cfg.holdout_fraction, derive_seed(seed, 0));
  std::size_t holdout_positives = 0;
  for (std::size_t i : split.test) holdout_positives += s[i];
  if (holdout_positives < cfg.min_holdout_positives) {
    throw DegenerateDataError("holdout has " + std::to_string(holdout_positives) + " labeled positives, need " +
                              std::to_string(cfg.min_holdout_positives));
  }
  std::vector<std::uint8_t> train_s;
  for (std::size_t i : split.train) train_s.push_back(s[i]);
  ModelPtr base = base_trainer(select_rows(features, split.train), train_s, derive_seed(seed, 1));

  double total = 0.0;
  for (std::size_t i : split.test) {
    if (s[i]) total += base->score(row_span(features, static_cast<Eigen::Index>(i)));
  }
  const double c_hat = total / static_cast<double>(holdout_positives);
  if (!(c_hat > 0.0)) throw CalibrationError("base model scores every held-out labeled positive at 0");
  return std::make_shared<ElkanotoModel>(std::move(base), std::min(1.0, c_hat));
}

inline std::shared_ptr<const ElkanotoModel> fit_elkanoto(const Trainer& base_trainer, const PuDataset& data,
                                                         const ElkanotoConfig& cfg, std::uint64_t seed) {
  return fit_elkanoto(base_trainer, data.features, data.s, cfg, seed);
}

inline Trainer elkanoto_trainer(Trainer base, ElkanotoConfig cfg = {}) {
  return [base = std::move(base), cfg](const Matrix& x, std::span<const std::uint8_t> s, std::uint64_t seed) -> ModelPtr {
    return fit_elkanoto(base, x, s, cfg, seed);
  };
}

struct PriorEstimate {
  double prior = 1.0;  // pi-hat = Pr(s=1) / c-hat, clipped to (0, 1]
  double c_hat = 1.0;
};

inline PriorEstimate estimate_class_prior(const Matrix& features, std::span<const std::uint8_t> s, std::uint64_t seed,
                                          const Trainer& base_trainer = logreg_trainer(), const ElkanotoConfig& cfg = {}) {
  require_rows_match(features, s);
  const double labeled = static_cast<double>(std::count(s.begin(), s.end(), std::uint8_t{1}));
  if (s.empty() || labeled == 0.0) throw DegenerateDataError("class prior needs at least one labeled positive");
  if (labeled == static_cast<double>(s.size())) return {1.0, 1.0};
  const auto model = fit_elkanoto(base_trainer, features, s, cfg, seed);
  const double prior = std::min(1.0, labeled / static_cast<double>(s.size()) / model->c_hat());
  return {prior, model->c_hat()};
}

inline PriorEstimate estimate_class_prior(const PuDataset& data, std::uint64_t seed) {
  return estimate_class_prior(data.features, data.s, seed);
}

// ---------------------------------------------------------------------------
// Bagging PU: each round fits the base model on all labeled positives
// against K unlabeled rows drawn as provisional negatives.
// ---------------------------------------------------------------------------

class BaggingPuModel : public ScoredModel {
 public:
  BaggingPuModel(std::vector<ModelPtr> members, std::vector<std::size_t> unlabeled_rows, std::vector<double> oob_scores,
                 std::size_t sample_size)
      : members_(std::move(members)),
        unlabeled_rows_(std::move(unlabeled_rows)),
        oob_scores_(std::move(oob_scores)),
        sample_size_(sample_size) {
    if (members_.empty()) throw ConfigError("rounds", "bagging needs at least one member");
  }

  ModelKind kind() const override { return ModelKind::bagging_pu; }
  std::size_t dim() const override { return members_.front()->dim(); }

  double score(std::span<const double> x) const override {
    double total = 0.0;
    for (const auto& m : members_) total += m->score(x);
    return total / static_cast<double>(members_.size());
  }

  std::size_t rounds() const { return members_.size(); }
  std::size_t sample_size() const { return sample_size_; }
  const std::vector<ModelPtr>& members() const { return members_; }
  // Training-set row index of every unlabeled example, aligned with oob_scores().
  const std::vector<std::size_t>& unlabeled_rows() const { return unlabeled_rows_; }
  // Mean score from rounds that did not draw the row; rows drawn in every
  // round fall back to the full-ensemble mean.
  const std::vector<double>& oob_scores() const { return oob_scores_; }

  void write(std::ostream& out) const override {
    out << "kind bagging_pu\nsample_size " << sample_size_ << "\nmembers " << members_.size() << '\n';
    for (const auto& m : members_) m->write(out);
  }

 private:
  std::vector<ModelPtr> members_;
  std::vector<std::size_t> unlabeled_rows_;
  std::vector<double> oob_scores_;
  std::size_t sample_size_;
};

struct BaggingConfig {
  std::size_t rounds = 100;
  std::size_t sample_size = 0;  // 0 selects the number of labeled positives
  bool replacement = true;
  std::size_t jobs = 1;
};

inline std::shared_ptr<const BaggingPuModel> fit_bagging_pu(const Trainer& base_trainer, const Matrix& features,
                                                            std::span<const std::uint8_t> s, const BaggingConfig& cfg,
                                                            std::uint64_t seed) {
  require_rows_match(features, s);
  if (cfg.rounds == 0) throw ConfigError("rounds", "must be >= 1");
  std::vector<std::size_t> positives, unlabeled;
  for (std::size_t i = 0; i < s.size(); ++i) (s[i] ? positives : unlabeled).push_back(i);
  if (positives.empty()) throw DegenerateDataError("bagging needs at least one labeled positive");
  if (unlabeled.empty()) throw DegenerateDataError("bagging needs at least one unlabeled example");
  const std::size_t k = cfg.sample_size > 0 ? cfg.sample_size : positives.size();
  if (!cfg.replacement && k > unlabeled.size()) {
    throw SamplingError("sample size " + std::to_string(k) + " exceeds " + std::to_string(unlabeled.size()) +
                        " unlabeled examples");
  }

  std::vector<ModelPtr> members(cfg.rounds);
  std::vector<std::vector<std::uint8_t>> drawn(cfg.rounds, std::vector<std::uint8_t>(unlabeled.size(), 0));
  parallel_for(cfg.rounds, cfg.jobs, [&](std::size_t r) {
    Rng rng = make_rng(derive_seed(seed, {r, 1}));
    std::vector<std::size_t> picks;
    if (cfg.replacement) {
      for (std::size_t i = 0; i < k; ++i) picks.push_back(uniform_index(rng, unlabeled.size()));
    } else {
      picks = sample_without_replacement(unlabeled.size(), k, rng);
    }
    std::vector<std::size_t> rows = positives;
    for (std::size_t p : picks) {
      rows.push_back(unlabeled[p]);
      drawn[r][p] = 1;
    }
    std::sort(rows.begin(), rows.end());
    std::vector<std::uint8_t> labels;
    labels.reserve(rows.size());
    for (std::size_t row : rows) labels.push_back(s[row]);
    members[r] = base_trainer(select_rows(features, rows), labels, derive_seed(seed, r));
  });

  std::vector<double> oob(unlabeled.size(), 0.0), counts(unlabeled.size(), 0.0), full(unlabeled.size(), 0.0);
  for (std::size_t r = 0; r < cfg.rounds; ++r) {
    for (std::size_t u = 0; u < unlabeled.size(); ++u) {
      const double sc = members[r]->score(row_span(features, static_cast<Eigen::Index>(unlabeled[u])));
      full[u] += sc;
      if (!drawn[r][u]) {
        oob[u] += sc;
        counts[u] += 1.0;
      }
    }
  }
  for (std::size_t u = 0; u < unlabeled.size(); ++u) {
    oob[u] = counts[u] > 0.0 ? oob[u] / counts[u] : full[u] / static_cast<double>(cfg.rounds);
  }
  return std::make_shared<BaggingPuModel>(std::move(members), std::move(unlabeled), std::move(oob), k);
}

inline std::shared_ptr<const BaggingPuModel> fit_bagging_pu(const Trainer& base_trainer, const PuDataset& data,
                                                            const BaggingConfig& cfg, std::uint64_t seed) {
  return fit_bagging_pu(base_trainer, data.features, data.s, cfg, seed);
}

inline Trainer bagging_pu_trainer(Trainer base, BaggingConfig cfg = {}) {
  return [base = std::move(base), cfg](const Matrix& x, std::span<const std::uint8_t> s, std::uint64_t seed) -> ModelPtr {
    return fit_bagging_pu(base, x, s, cfg, seed);
  };
}

// ---------------------------------------------------------------------------
// Unbiased PU risk with the double hinge loss.
// ---------------------------------------------------------------------------

// l(z) = max(-z, max(0, (1 - z) / 2)); satisfies l(z) - l(-z) = -z.
inline double double_hinge_loss(double z) { return std::max(-z, std::max(0.0, 0.5 * (1.0 - z))); }

// R = pi * mean_P l(g) - pi * mean_P l(-g) + mean_U l(-g), where P holds
// decision values of labeled positives and U of a sample of the marginal.
inline double upu_risk(std::span<const double> positive_margins, std::span<const double> unlabeled_margins, double prior) {
  double pos = 0.0, pos_neg = 0.0, unl = 0.0;
  for (double g : positive_margins) {
    pos += double_hinge_loss(g);
    pos_neg += double_hinge_loss(-g);
  }
  for (double g : unlabeled_margins) unl += double_hinge_loss(-g);
  const double np = static_cast<double>(positive_margins.size());
  const double nu = static_cast<double>(unlabeled_margins.size());
  return prior * pos / np - prior * pos_neg / np + unl / nu;
}

class UpuModel : public ScoredModel {
 public:
  UpuModel(LinearModel linear, double prior, std::vector<double> risk_log)
      : linear_(std::move(linear)), prior_(prior), risk_log_(std::move(risk_log)) {}

  ModelKind kind() const override { return ModelKind::upu; }
  std::size_t dim() const override { return linear_.dim(); }
  double score(std::span<const double> x) const override { return linear_.score(x); }

  double decision(std::span<const double> x) const { return linear_.margin(x); }
  double prior() const { return prior_; }
  const LinearModel& linear() const { return linear_; }
  // Empirical risk (without the L2 term) after each epoch.
  const std::vector<double>& risk_log() const { return risk_log_; }

  void write(std::ostream& out) const override {
    out << "kind upu\nprior " << prior_ << '\n';
    linear_.write_body(out);
  }

 private:
  LinearModel linear_;
  double prior_;
  std::vector<double> risk_log_;
};

struct UpuConfig {
  std::optional<double> prior;  // estimated from the data when absent
  std::size_t epochs = 200;
  double learning_rate = 0.1;
  double l2 = 1e-3;
};

// Full-batch subgradient descent on the unbiased risk of a linear decision
// function. The whole training set serves as the unlabeled sample of the
// marginal; labeled rows form the positive sample.
inline std::shared_ptr<const UpuModel> fit_upu(const Matrix& features, std::span<const std::uint8_t> s,
                                               const UpuConfig& cfg, std::uint64_t seed) {
  require_rows_match(features, s);
  std::vector<std::size_t> positives;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i]) positives.push_back(i);
  }
  if (positives.empty()) throw DegenerateDataError("uPU needs at least one labeled positive");
  if (positives.size() == s.size()) throw DegenerateDataError("uPU needs at least one unlabeled example");
  const double n = static_cast<double>(s.size());
  // An estimated prior is clipped to (0, 1] upstream; 1 would make every
  // row positive, so it is held just below.
  const double prior = cfg.prior ? *cfg.prior : std::min(estimate_class_prior(features, s, seed).prior, 1.0 - 1.0 / n);
  if (!(prior > 0.0 && prior < 1.0)) throw ConfigError("prior", "class prior must lie in (0, 1), got " + std::to_string(prior));

  auto scaler = Standardizer::fit(features);
  const Matrix z = scaler.transform(features);
  const double np = static_cast<double>(positives.size());
  Vector positive_mean = Vector::Zero(z.cols());
  for (std::size_t i : positives) positive_mean += z.row(static_cast<Eigen::Index>(i)).transpose();
  positive_mean /= np;

  Vector w = Vector::Zero(z.cols());
  double b = 0.0;
  std::vector<double> risk_log;
  risk_log.reserve(cfg.epochs);
  Vector margins(z.rows());
  auto risk = [&] {
    margins = z * w + Vector::Constant(z.rows(), b);
    std::vector<double> pm, um(margins.data(), margins.data() + margins.size());
    for (std::size_t i : positives) pm.push_back(margins(static_cast<Eigen::Index>(i)));
    return upu_risk(pm, um, prior);
  };
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    risk();
    // d/dg l(-g): 0 below -1, 1/2 on (-1, 1), 1 above 1.
    Vector slope(z.rows());
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const double g = margins(i);
      slope(i) = g > 1.0 ? 1.0 : (g > -1.0 ? 0.5 : 0.0);
    }
    const Vector grad_w = -prior * positive_mean + z.transpose() * slope / n + cfg.l2 * w;
    const double grad_b = -prior + slope.sum() / n;
    const double lr = cfg.learning_rate / std::sqrt(1.0 + static_cast<double>(epoch));
    w -= lr * grad_w;
    b -= lr * grad_b;
    risk_log.push_back(risk());
  }
  LinearModel linear(ModelKind::upu, std::move(scaler), std::move(w), b, PlattSigmoid{});
  return std::make_shared<UpuModel>(std::move(linear), prior, std::move(risk_log));
}

inline std::shared_ptr<const UpuModel> fit_upu(const PuDataset& data, const UpuConfig& cfg, std::uint64_t seed) {
  return fit_upu(data.features, data.s, cfg, seed);
}

inline Trainer upu_trainer(UpuConfig cfg = {}) {
  return [cfg](const Matrix& x, std::span<const std::uint8_t> s, std::uint64_t seed) -> ModelPtr {
    return fit_upu(x, s, cfg, seed);
  };
}

}  // namespace pugraph
