#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "pugraph/embedding.hpp"
#include "pugraph/skipgram.hpp"
#include "pugraph/walks.hpp"

namespace pugraph {

// Triangles through each node, ignoring self-loops and weights.
inline std::vector<std::size_t> triangle_counts(const TransactionGraph& graph) {
  const std::size_t n = graph.node_count();
  std::vector<std::size_t> tri(n, 0);
  for (NodeId u = 0; u < n; ++u) {
    const auto nbrs = graph.neighbors(u);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      const NodeId v = nbrs[i].node;
      if (v <= u) continue;
      for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
        const NodeId w = nbrs[j].node;
        if (graph.has_edge(v, w)) {
          ++tri[u];
          ++tri[v];
          ++tri[w];
        }
      }
    }
  }
  return tri;
}

inline std::size_t simple_degree(const TransactionGraph& graph, NodeId v) {
  std::size_t deg = 0;
  for (const Neighbor& nb : graph.neighbors(v)) deg += nb.node != v;
  return deg;
}

// Dense role ids from (floor(log2(degree + 1)), min(triangles, bins - 1)),
// numbered in sorted order of the feature pair.
inline std::vector<std::uint32_t> structural_roles(const TransactionGraph& graph, std::size_t triangle_bins = 4) {
  if (triangle_bins == 0) throw ConfigError("triangle_bins", "must be >= 1");
  const auto tri = triangle_counts(graph);
  std::vector<std::pair<std::size_t, std::size_t>> features(graph.node_count());
  std::map<std::pair<std::size_t, std::size_t>, std::uint32_t> role_ids;
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    const auto log_degree = static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(simple_degree(graph, v)) + 1.0)));
    features[v] = {log_degree, std::min(tri[v], triangle_bins - 1)};
    role_ids.emplace(features[v], 0);
  }
  std::uint32_t next = 0;
  for (auto& [key, id] : role_ids) id = next++;
  std::vector<std::uint32_t> roles(graph.node_count());
  for (NodeId v = 0; v < graph.node_count(); ++v) roles[v] = role_ids.at(features[v]);
  return roles;
}

struct Role2VecConfig {
  WalkConfig walk;
  SkipGramConfig skipgram;
  std::size_t triangle_bins = 4;
};

// Walks rewritten as role sequences; each node takes its role's vector.
inline EmbeddingMatrix train_role2vec(const TransactionGraph& graph, const Role2VecConfig& cfg, std::size_t jobs = 1) {
  const auto roles = structural_roles(graph, cfg.triangle_bins);
  const std::size_t role_count = roles.empty() ? 0 : *std::max_element(roles.begin(), roles.end()) + 1;
  auto walks = generate_walks(graph, cfg.walk, jobs);
  for (auto& walk : walks) {
    for (auto& v : walk) v = roles[v];
  }
  const Matrix role_vectors = train_skipgram_tokens(walks, role_count, cfg.skipgram);
  Matrix vectors(static_cast<Eigen::Index>(graph.node_count()), role_vectors.cols());
  for (NodeId v = 0; v < graph.node_count(); ++v) vectors.row(v) = role_vectors.row(roles[v]);
  return EmbeddingMatrix::for_graph(graph, std::move(vectors), "role2vec");
}

}  // namespace pugraph
