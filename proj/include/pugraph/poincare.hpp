#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "pugraph/embedding.hpp"
#include "pugraph/error.hpp"
#include "pugraph/rng.hpp"

namespace pugraph {

inline constexpr double kBallEpsilon = 1e-5;

struct PoincareConfig {
  std::size_t dim = 64;
  std::size_t epochs = 50;
  std::size_t burn_in_epochs = 2;
  double burn_in_factor = 0.1;  // learning-rate multiplier during burn-in
  double learning_rate = 0.1;
  std::size_t negatives = 10;
  std::uint64_t rng_seed = 0;
  // Called after every Riemannian update with the node and its new point.
  std::function<void(NodeId, std::span<const double>)> on_step;

  void validate() const {
    if (dim == 0) throw ConfigError("dim", "must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate", "must be > 0");
    if (!(burn_in_factor > 0.0)) throw ConfigError("burn_in_factor", "must be > 0");
  }
};

struct PoincareEmbedding {
  Matrix vectors;  // every row strictly inside the unit ball
  std::vector<std::string> node_ids;
  std::size_t burn_in_epochs = 0;
  std::size_t epochs = 0;
  double learning_rate = 0.0;
  std::size_t negatives = 0;

  EmbeddingMatrix as_embedding() const { return {vectors, node_ids, "poincare"}; }
};

inline double poincare_distance(std::span<const double> u, std::span<const double> v) {
  double uu = 0.0, vv = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uu += u[i] * u[i];
    vv += v[i] * v[i];
    diff += (u[i] - v[i]) * (u[i] - v[i]);
  }
  const double gamma = 1.0 + 2.0 * diff / ((1.0 - uu) * (1.0 - vv));
  return std::acosh(std::max(1.0, gamma));
}

// Adds d(theta, x) / d theta, scaled by `scale`, into `grad`.
inline void accumulate_distance_gradient(std::span<const double> theta, std::span<const double> x, double scale,
                                         std::span<double> grad) {
  double tt = 0.0, xx = 0.0, tx = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    tt += theta[i] * theta[i];
    xx += x[i] * x[i];
    tx += theta[i] * x[i];
    diff += (theta[i] - x[i]) * (theta[i] - x[i]);
  }
  const double alpha = 1.0 - tt;
  const double beta = 1.0 - xx;
  const double gamma = 1.0 + 2.0 * diff / (alpha * beta);
  const double root = std::sqrt(std::max(gamma * gamma - 1.0, 1e-15));
  const double coef = 4.0 / (beta * root);
  const double a = (xx - 2.0 * tx + 1.0) / (alpha * alpha);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    grad[i] += scale * coef * (a * theta[i] - x[i] / alpha);
  }
}

// Pulls a point back inside the ball at radius 1 - kBallEpsilon.
inline void project_to_ball(std::span<double> point) {
  double norm2 = 0.0;
  for (double v : point) norm2 += v * v;
  const double limit = 1.0 - kBallEpsilon;
  if (norm2 >= limit * limit) {
    const double scale = limit / std::sqrt(norm2) * (1.0 - 1e-12);
    for (double& v : point) v *= scale;
  }
}

// Riemannian SGD over edge pairs with sampled non-neighbors as negatives:
// loss = -log(exp(-d(u,v)) / sum_{w in {v} + negatives} exp(-d(u,w))).
inline PoincareEmbedding train_poincare(const TransactionGraph& graph, const PoincareConfig& cfg) {
  cfg.validate();
  const std::size_t n = graph.node_count();
  if (n == 0) throw Error("graph", "cannot embed an empty graph");
  const std::size_t d = cfg.dim;

  PoincareEmbedding result;
  result.node_ids.assign(graph.external_ids().begin(), graph.external_ids().end());
  result.burn_in_epochs = cfg.burn_in_epochs;
  result.epochs = cfg.epochs;
  result.learning_rate = cfg.learning_rate;
  result.negatives = cfg.negatives;

  Rng rng = make_rng(cfg.rng_seed);
  result.vectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < result.vectors.size(); ++i) result.vectors.data()[i] = uniform_real(rng, -1e-3, 1e-3);

  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId u = 0; u < n; ++u) {
    for (const Neighbor& nb : graph.neighbors(u)) {
      if (nb.node != u) pairs.emplace_back(u, nb.node);
    }
  }

  std::vector<NodeId> targets;
  std::vector<double> dist, weight;
  std::vector<std::vector<double>> grads;
  std::vector<double> grad_u(d);
  auto point = [&](NodeId v) { return row_span(result.vectors, static_cast<Eigen::Index>(v)); };
  auto apply = [&](NodeId v, std::span<const double> grad, double lr) {
    auto p = point(v);
    double norm2 = 0.0;
    for (double x : p) norm2 += x * x;
    const double metric = (1.0 - norm2) * (1.0 - norm2) / 4.0;
    for (std::size_t i = 0; i < d; ++i) p[i] -= lr * metric * grad[i];
    project_to_ball(p);
    if (cfg.on_step) cfg.on_step(v, p);
  };

  const std::size_t total_epochs = cfg.burn_in_epochs + cfg.epochs;
  for (std::size_t epoch = 0; epoch < total_epochs; ++epoch) {
    const double lr = epoch < cfg.burn_in_epochs ? cfg.learning_rate * cfg.burn_in_factor : cfg.learning_rate;
    shuffle(pairs, rng);
    for (const auto& [u, v] : pairs) {
      targets.assign(1, v);
      for (std::size_t k = 0, tries = 0; k < cfg.negatives && tries < 10 * cfg.negatives; ++tries) {
        const auto w = static_cast<NodeId>(uniform_index(rng, n));
        if (w == u || graph.has_edge(u, w)) continue;
        targets.push_back(w);
        ++k;
      }
      dist.resize(targets.size());
      weight.resize(targets.size());
      double max_neg = -1e300;
      for (std::size_t t = 0; t < targets.size(); ++t) {
        dist[t] = poincare_distance(point(u), point(targets[t]));
        max_neg = std::max(max_neg, -dist[t]);
      }
      double z = 0.0;
      for (std::size_t t = 0; t < targets.size(); ++t) z += std::exp(-dist[t] - max_neg);
      // dL/dd_t = [t == 0] - softmax_t
      for (std::size_t t = 0; t < targets.size(); ++t) {
        weight[t] = (t == 0 ? 1.0 : 0.0) - std::exp(-dist[t] - max_neg) / z;
      }
      std::fill(grad_u.begin(), grad_u.end(), 0.0);
      grads.assign(targets.size(), std::vector<double>(d, 0.0));
      for (std::size_t t = 0; t < targets.size(); ++t) {
        accumulate_distance_gradient(point(u), point(targets[t]), weight[t], grad_u);
        accumulate_distance_gradient(point(targets[t]), point(u), weight[t], grads[t]);
      }
      apply(u, grad_u, lr);
      for (std::size_t t = 0; t < targets.size(); ++t) apply(targets[t], grads[t], lr);
    }
  }
  return result;
}

}  // namespace pugraph
