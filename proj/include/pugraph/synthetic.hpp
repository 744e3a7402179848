#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "pugraph/dataset.hpp"
#include "pugraph/error.hpp"
#include "pugraph/graph.hpp"
#include "pugraph/rng.hpp"

namespace pugraph {

// Planted-partition transaction graph with illicit nodes concentrated in
// block 0 and wired to each other with extra probability.
struct SyntheticSpec {
  std::size_t n_nodes = 2000;
  std::size_t n_illicit = 100;
  std::size_t n_blocks = 4;
  double p_in = 0.004;
  double p_out = 0.0007;
  double illicit_concentration = 0.8;  // share of illicit nodes placed in block 0
  double p_illicit = 0.03;             // extra edge probability between illicit pairs
  double label_frequency = 1.0;        // c: share of illicit nodes that get s = 1

  void validate() const {
    if (n_nodes == 0) throw ConfigError("n_nodes", "must be >= 1");
    if (n_illicit >= n_nodes) throw ConfigError("n_illicit", "must be smaller than n_nodes");
    if (n_blocks == 0 || n_blocks > n_nodes) throw ConfigError("n_blocks", "must lie in [1, n_nodes]");
    auto probability = [](const char* key, double p) {
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(key, "probability must lie in [0, 1]");
    };
    probability("p_in", p_in);
    probability("p_out", p_out);
    probability("p_illicit", p_illicit);
    probability("illicit_concentration", illicit_concentration);
    if (!(label_frequency > 0.0 && label_frequency <= 1.0)) throw ConfigError("label_frequency", "must lie in (0, 1]");
    if (illicit_concentration * static_cast<double>(n_illicit) > static_cast<double>(n_nodes / n_blocks) + 0.5) {
      throw ConfigError("illicit_concentration", "block 0 is too small to hold the concentrated illicit nodes");
    }
  }
};

struct SyntheticDataset {
  TransactionGraph graph;
  LabelStore labels;  // y always present
  std::vector<std::size_t> block;
};

inline SyntheticDataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng = make_rng(seed);
  const std::size_t n = spec.n_nodes;
  SyntheticDataset out;
  out.block.resize(n);
  for (std::size_t v = 0; v < n; ++v) out.block[v] = v * spec.n_blocks / n;

  std::vector<std::size_t> in_block0, elsewhere;
  for (std::size_t v = 0; v < n; ++v) (out.block[v] == 0 ? in_block0 : elsewhere).push_back(v);
  const auto concentrated = static_cast<std::size_t>(std::llround(spec.illicit_concentration * static_cast<double>(spec.n_illicit)));
  std::vector<std::uint8_t> y(n, 0);
  std::vector<std::size_t> illicit;
  for (std::size_t i : sample_without_replacement(in_block0.size(), concentrated, rng)) illicit.push_back(in_block0[i]);
  const std::size_t rest = spec.n_illicit - concentrated;
  if (rest > elsewhere.size()) throw ConfigError("n_illicit", "not enough nodes outside block 0");
  for (std::size_t i : sample_without_replacement(elsewhere.size(), rest, rng)) illicit.push_back(elsewhere[i]);
  for (std::size_t v : illicit) y[v] = 1;

  GraphBuilder builder;
  builder.add_numbered_nodes(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      double p = out.block[u] == out.block[v] ? spec.p_in : spec.p_out;
      if (y[u] && y[v]) p = 1.0 - (1.0 - p) * (1.0 - spec.p_illicit);
      if (uniform_unit(rng) < p) builder.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
  }
  out.graph = builder.build();

  const auto labeled = static_cast<std::size_t>(std::llround(spec.label_frequency * static_cast<double>(spec.n_illicit)));
  out.labels.s.assign(n, 0);
  for (std::size_t i : sample_without_replacement(illicit.size(), labeled, rng)) out.labels.s[illicit[i]] = 1;
  out.labels.y = std::move(y);
  return out;
}

// Two Gaussian classes in `dim` dimensions, means +/- separation/2 along the
// first axis. Exactly round(prior * n) rows are positive and
// round(label_frequency * positives) of them, chosen uniformly, get s = 1.
struct BlobSpec {
  std::size_t n = 2000;
  double prior = 0.1;
  double label_frequency = 0.5;
  std::size_t dim = 2;
  double separation = 6.0;
  double positive_spread = 0.2;  // standard deviation of the positive blob
};

inline PuDataset generate_scar_blobs(const BlobSpec& spec, std::uint64_t seed) {
  if (!(spec.prior > 0.0 && spec.prior < 1.0)) throw ConfigError("prior", "must lie in (0, 1)");
  if (!(spec.label_frequency > 0.0 && spec.label_frequency <= 1.0)) throw ConfigError("label_frequency", "must lie in (0, 1]");
  if (spec.dim == 0) throw ConfigError("dim", "must be >= 1");
  if (!(spec.positive_spread > 0.0)) throw ConfigError("positive_spread", "must be > 0");
  Rng rng = make_rng(seed);
  PuDataset data;
  data.features.resize(static_cast<Eigen::Index>(spec.n), static_cast<Eigen::Index>(spec.dim));
  data.y.emplace(spec.n, 0);
  const auto n_pos = static_cast<std::size_t>(std::llround(spec.prior * static_cast<double>(spec.n)));
  std::vector<std::size_t> positives = sample_without_replacement(spec.n, n_pos, rng);
  for (std::size_t i : positives) (*data.y)[i] = 1;
  for (std::size_t i = 0; i < spec.n; ++i) {
    const bool pos = (*data.y)[i] != 0;
    const double center = (pos ? 0.5 : -0.5) * spec.separation;
    const double sd = pos ? spec.positive_spread : 1.0;
    for (std::size_t j = 0; j < spec.dim; ++j) {
      data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sd * standard_normal(rng) + (j == 0 ? center : 0.0);
    }
  }
  data.s.assign(spec.n, 0);
  const auto n_labeled = static_cast<std::size_t>(std::llround(spec.label_frequency * static_cast<double>(n_pos)));
  for (std::size_t i : sample_without_replacement(n_pos, n_labeled, rng)) data.s[positives[i]] = 1;
  return data;
}

}  // namespace pugraph
