#pragma once

#include <cstdint>
#include <vector>

#include "pugraph/error.hpp"
#include "pugraph/graph.hpp"
#include "pugraph/parallel.hpp"
#include "pugraph/rng.hpp"

namespace pugraph {

struct WalkConfig {
  double p = 1.0;  // return parameter
  double q = 1.0;  // in-out parameter
  std::size_t walk_length = 5;
  std::size_t walks_per_node = 10;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (!(p > 0.0)) throw ConfigError("p", "must be > 0");
    if (!(q > 0.0)) throw ConfigError("q", "must be > 0");
    if (walk_length < 1) throw ConfigError("walk_length", "must be >= 1");
    if (walks_per_node < 1) throw ConfigError("walks_per_node", "must be >= 1");
  }
};

using Walk = std::vector<NodeId>;

namespace detail {

// Second-order step: unnormalized weight w(cur,x) * {1/p if x == prev,
// 1 if x is adjacent to prev, 1/q otherwise}.
inline NodeId biased_step(const TransactionGraph& g, NodeId prev, NodeId cur, double p, double q, Rng& rng) {
  const auto nbrs = g.neighbors(cur);
  double total = 0.0;
  thread_local std::vector<double> weights;
  weights.resize(nbrs.size());
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    const NodeId x = nbrs[i].node;
    double bias = 1.0 / q;
    if (x == prev) {
      bias = 1.0 / p;
    } else if (g.has_edge(prev, x)) {
      bias = 1.0;
    }
    weights[i] = nbrs[i].weight * bias;
    total += weights[i];
  }
  if (total <= 0.0) return nbrs[uniform_index(rng, nbrs.size())].node;
  double r = uniform_unit(rng) * total;
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    r -= weights[i];
    if (r < 0.0) return nbrs[i].node;
  }
  return nbrs.back().node;
}

}  // namespace detail

// walks_per_node walks from every node. Walk (round r, start v) sits at
// index r * n + v and draws from its own derived seed, so the corpus is
// identical for any `jobs`.
inline std::vector<Walk> generate_walks(const TransactionGraph& graph, const WalkConfig& cfg, std::size_t jobs = 1) {
  cfg.validate();
  const std::size_t n = graph.node_count();
  if (n == 0) throw Error("graph", "cannot generate walks on an empty graph");

  const bool first_order = cfg.p == 1.0 && cfg.q == 1.0;
  std::vector<AliasTable> tables(n);
  for (NodeId v = 0; v < n; ++v) {
    std::vector<double> w;
    for (const Neighbor& nb : graph.neighbors(v)) w.push_back(nb.weight);
    tables[v] = AliasTable(w);
  }
  auto first_step = [&](NodeId cur, Rng& rng) -> NodeId {
    const auto nbrs = graph.neighbors(cur);
    if (tables[cur].empty()) return nbrs[uniform_index(rng, nbrs.size())].node;
    return nbrs[tables[cur].draw(rng)].node;
  };

  std::vector<Walk> walks(n * cfg.walks_per_node);
  parallel_for(walks.size(), jobs, [&](std::size_t idx) {
    const std::size_t round = idx / n;
    const auto start = static_cast<NodeId>(idx % n);
    Rng rng = make_rng(derive_seed(cfg.rng_seed, {round, start}));
    Walk& walk = walks[idx];
    walk.reserve(cfg.walk_length);
    walk.push_back(start);
    while (walk.size() < cfg.walk_length) {
      const NodeId cur = walk.back();
      if (graph.degree(cur) == 0) break;
      if (walk.size() == 1 || first_order) {
        walk.push_back(first_step(cur, rng));
      } else {
        walk.push_back(detail::biased_step(graph, walk[walk.size() - 2], cur, cfg.p, cfg.q, rng));
      }
    }
  });
  return walks;
}

}  // namespace pugraph
