#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <vector>

#include "pugraph/dataset.hpp"
#include "pugraph/model.hpp"
#include "pugraph/rng.hpp"

namespace pugraph {

// Column standardization learned on training rows; zero-variance columns
// are centered only.
struct Standardizer {
  Vector mean;
  Vector inv_scale;

  static Standardizer fit(const Matrix& x) {
    Standardizer s;
    const double n = static_cast<double>(std::max<Eigen::Index>(1, x.rows()));
    s.mean = x.colwise().sum().transpose() / n;
    s.inv_scale.resize(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double var = (x.col(j).array() - s.mean(j)).square().sum() / n;
      s.inv_scale(j) = var > 1e-24 ? 1.0 / std::sqrt(var) : 1.0;
    }
    return s;
  }

  Matrix transform(const Matrix& x) const {
    return ((x.rowwise() - mean.transpose()).array().rowwise() * inv_scale.transpose().array()).matrix();
  }
};

// p = 1 / (1 + exp(a * margin + b)).
struct PlattSigmoid {
  double a = -1.0;
  double b = 0.0;

  double operator()(double margin) const {
    const double z = a * margin + b;
    if (z >= 0.0) {
      const double e = std::exp(-z);
      return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
  }
};

// Platt's sigmoid fit with the regularized targets and Newton/backtracking
// iteration of Lin, Lin and Weng (2007).
inline PlattSigmoid fit_platt(std::span<const double> margins, std::span<const std::uint8_t> labels) {
  double prior1 = 0.0, prior0 = 0.0;
  for (auto l : labels) (l ? prior1 : prior0) += 1.0;
  const double hi = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo = 1.0 / (prior0 + 2.0);
  const std::size_t n = margins.size();
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = labels[i] ? hi : lo;

  double a = 0.0, b = std::log((prior0 + 1.0) / (prior1 + 1.0));
  auto objective = [&](double aa, double bb) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = margins[i] * aa + bb;
      f += z >= 0.0 ? t[i] * z + std::log1p(std::exp(-z)) : (t[i] - 1.0) * z + std::log1p(std::exp(z));
    }
    return f;
  };
  double fval = objective(a, b);
  constexpr double sigma = 1e-12, min_step = 1e-10, eps = 1e-5;
  for (int iter = 0; iter < 100; ++iter) {
    double h11 = sigma, h22 = sigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = margins[i] * a + b;
      double p, q;
      if (z >= 0.0) {
        p = std::exp(-z) / (1.0 + std::exp(-z));
        q = 1.0 / (1.0 + std::exp(-z));
      } else {
        p = 1.0 / (1.0 + std::exp(z));
        q = std::exp(z) / (1.0 + std::exp(z));
      }
      const double d2 = p * q;
      h11 += margins[i] * margins[i] * d2;
      h22 += d2;
      h21 += margins[i] * d2;
      const double d1 = t[i] - p;
      g1 += margins[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < eps && std::abs(g2) < eps) break;
    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    while (step >= min_step) {
      const double na = a + step * da, nb = b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < min_step) break;
  }
  return {a, b};
}

// Linear scorer on standardized features: score = link(w . z(x) + bias).
class LinearModel : public ScoredModel {
 public:
  LinearModel(ModelKind kind, Standardizer scaler, Vector weights, double bias, PlattSigmoid link)
      : kind_(kind), scaler_(std::move(scaler)), weights_(std::move(weights)), bias_(bias), link_(link) {}

  ModelKind kind() const override { return kind_; }
  std::size_t dim() const override { return static_cast<std::size_t>(weights_.size()); }

  double margin(std::span<const double> x) const {
    double m = bias_;
    for (Eigen::Index j = 0; j < weights_.size(); ++j) {
      m += weights_(j) * (x[static_cast<std::size_t>(j)] - scaler_.mean(j)) * scaler_.inv_scale(j);
    }
    return m;
  }

  double score(std::span<const double> x) const override { return link_(margin(x)); }

  const Vector& weights() const { return weights_; }
  double bias() const { return bias_; }
  const PlattSigmoid& link() const { return link_; }
  const Standardizer& scaler() const { return scaler_; }

  void write(std::ostream& out) const override {
    out << "kind " << to_string(kind_) << '\n';
    write_body(out);
  }

  void write_body(std::ostream& out) const {
    detail::write_vector(out, "mean", scaler_.mean);
    detail::write_vector(out, "inv_scale", scaler_.inv_scale);
    detail::write_vector(out, "weights", weights_);
    out << "bias " << bias_ << "\nlink " << link_.a << ' ' << link_.b << '\n';
  }

  static LinearModel read_body(std::istream& in, ModelKind kind) {
    Standardizer s;
    s.mean = detail::read_vector(in, "mean");
    s.inv_scale = detail::read_vector(in, "inv_scale");
    Vector w = detail::read_vector(in, "weights");
    const auto bias = detail::read_value<double>(in, "bias");
    PlattSigmoid link;
    detail::expect_token(in, "link");
    if (!(in >> link.a >> link.b)) throw IoError("model file: bad link");
    return LinearModel(kind, std::move(s), std::move(w), bias, link);
  }

 private:
  ModelKind kind_;
  Standardizer scaler_;
  Vector weights_;
  double bias_;
  PlattSigmoid link_;
};

struct LogRegConfig {
  double l2 = 1e-4;
  std::size_t epochs = 60;
  double learning_rate = 0.1;
};

namespace detail {

// Averaged SGD shared by the linear learners. `loss_grad(margin, label)`
// returns d loss / d margin for one example; the L2 term is applied to w.
template <typename LossGrad>
std::pair<Vector, double> averaged_sgd(const Matrix& z, std::span<const std::uint8_t> labels, double l2,
                                       std::size_t epochs, double lr0, std::uint64_t seed, LossGrad loss_grad) {
  const Eigen::Index d = z.cols();
  Vector w = Vector::Zero(d), w_avg = Vector::Zero(d);
  double b = 0.0, b_avg = 0.0, averaged = 0.0;
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = make_rng(seed);
  double t = 0.0;
  const std::size_t burn = epochs / 2;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t i : order) {
      const double lr = lr0 / (1.0 + lr0 * std::max(l2, 1e-3) * t);
      t += 1.0;
      const auto row = z.row(static_cast<Eigen::Index>(i));
      const double m = row.dot(w) + b;
      const double g = loss_grad(m, labels[i]);
      w *= (1.0 - lr * l2);
      if (g != 0.0) {
        w.noalias() -= (lr * g) * row.transpose();
        b -= lr * g;
      }
      if (epoch >= burn) {
        averaged += 1.0;
        w_avg += (w - w_avg) / averaged;
        b_avg += (b - b_avg) / averaged;
      }
    }
  }
  return {w_avg, b_avg};
}

}  // namespace detail

// L2-regularized logistic regression by averaged SGD.
inline std::shared_ptr<const LinearModel> fit_logreg(const Matrix& features, std::span<const std::uint8_t> labels,
                                                     const LogRegConfig& cfg, std::uint64_t seed) {
  require_rows_match(features, labels);
  require_both_classes(labels);
  if (cfg.l2 < 0.0) throw ConfigError("l2", "must be nonnegative");
  auto scaler = Standardizer::fit(features);
  const Matrix z = scaler.transform(features);
  auto [w, b] = detail::averaged_sgd(z, labels, cfg.l2, cfg.epochs, cfg.learning_rate, seed,
                                     [](double m, std::uint8_t y) { return PlattSigmoid{}(m) - (y ? 1.0 : 0.0); });
  return std::make_shared<LinearModel>(ModelKind::logreg, std::move(scaler), std::move(w), b, PlattSigmoid{});
}

inline std::shared_ptr<const LinearModel> fit_logreg(const PuDataset& train, const LogRegConfig& cfg, std::uint64_t seed) {
  return fit_logreg(train.features, train.s, cfg, seed);
}

struct LinearSvmConfig {
  double c_reg = 1.0;
  std::size_t epochs = 60;
  double learning_rate = 0.1;
  double calibration_fraction = 0.2;
};

// Hinge-loss linear SVM by subgradient descent, with a Platt sigmoid fitted
// to the margins of a random held-in slice of the training rows.
inline std::shared_ptr<const LinearModel> fit_linear_svm(const Matrix& features, std::span<const std::uint8_t> labels,
                                                         const LinearSvmConfig& cfg, std::uint64_t seed) {
  require_rows_match(features, labels);
  require_both_classes(labels);
  if (!(cfg.c_reg > 0.0)) throw ConfigError("c_reg", "must be > 0");
  auto scaler = Standardizer::fit(features);
  const Matrix z = scaler.transform(features);
  const double l2 = 1.0 / (cfg.c_reg * static_cast<double>(labels.size()));
  auto [w, b] = detail::averaged_sgd(z, labels, l2, cfg.epochs, cfg.learning_rate, derive_seed(seed, 0),
                                     [](double m, std::uint8_t y) {
                                       const double sign = y ? 1.0 : -1.0;
                                       return sign * m < 1.0 ? -sign : 0.0;
                                     });

  Rng rng = make_rng(derive_seed(seed, 1));
  const auto slice_size = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(cfg.calibration_fraction * static_cast<double>(labels.size()))));
  std::vector<double> margins;
  std::vector<std::uint8_t> slice_labels;
  for (std::size_t i : sample_without_replacement(labels.size(), std::min(slice_size, labels.size()), rng)) {
    margins.push_back(z.row(static_cast<Eigen::Index>(i)).dot(w) + b);
    slice_labels.push_back(labels[i]);
  }
  const PlattSigmoid link = fit_platt(margins, slice_labels);
  return std::make_shared<LinearModel>(ModelKind::linear_svm, std::move(scaler), std::move(w), b, link);
}

inline std::shared_ptr<const LinearModel> fit_linear_svm(const PuDataset& train, const LinearSvmConfig& cfg,
                                                         std::uint64_t seed) {
  return fit_linear_svm(train.features, train.s, cfg, seed);
}

inline Trainer logreg_trainer(LogRegConfig cfg = {}) {
  return [cfg](const Matrix& x, std::span<const std::uint8_t> labels, std::uint64_t seed) -> ModelPtr {
    return fit_logreg(x, labels, cfg, seed);
  };
}

inline Trainer linear_svm_trainer(LinearSvmConfig cfg = {}) {
  return [cfg](const Matrix& x, std::span<const std::uint8_t> labels, std::uint64_t seed) -> ModelPtr {
    return fit_linear_svm(x, labels, cfg, seed);
  };
}

}  // namespace pugraph
