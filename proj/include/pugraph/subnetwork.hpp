#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pugraph/graph.hpp"
#include "pugraph/graph_io.hpp"
#include "pugraph/rng.hpp"

namespace pugraph {

// Induced subgraph around labeled positives and an equal-sized uniform
// sample of unlabeled nodes. Seed ids index into `graph`; `parent_ids`
// maps every subgraph node back to the graph it was cut from.
struct SubnetworkSample {
  TransactionGraph graph;
  std::vector<NodeId> seed_positives;
  std::vector<NodeId> seed_negatives;
  std::vector<NodeId> parent_ids;
  std::uint64_t rng_seed = 0;
  std::string parent_dataset_id;

  // Seeds in classification order: positives first, then negatives.
  std::vector<NodeId> seeds() const {
    std::vector<NodeId> all = seed_positives;
    all.insert(all.end(), seed_negatives.begin(), seed_negatives.end());
    return all;
  }
};

inline TransactionGraph induced_subgraph(const TransactionGraph& parent, const std::vector<NodeId>& nodes) {
  GraphBuilder builder(parent.directed());
  std::vector<std::int64_t> local(parent.node_count(), -1);
  for (NodeId v : nodes) {
    local[v] = builder.add_node(parent.external_id(v));
  }
  for (const Edge& e : parent.edges()) {
    if (local[e.src] >= 0 && local[e.dst] >= 0) {
      builder.add_edge(static_cast<NodeId>(local[e.src]), static_cast<NodeId>(local[e.dst]), e.weight);
    }
  }
  return builder.build();
}

inline SubnetworkSample sample_subnetwork(const TransactionGraph& graph, const LabelStore& labels, std::uint64_t rng_seed,
                                          std::string parent_dataset_id = {}) {
  if (labels.size() != graph.node_count()) throw SamplingError("label store does not match graph size");
  std::vector<NodeId> positives, unlabeled;
  for (NodeId v = 0; v < graph.node_count(); ++v) (labels.s[v] ? positives : unlabeled).push_back(v);
  if (positives.empty()) throw SamplingError("no labeled positives to seed the subnetwork");
  if (unlabeled.size() < positives.size()) {
    throw SamplingError("only " + std::to_string(unlabeled.size()) + " unlabeled nodes for " +
                        std::to_string(positives.size()) + " positives");
  }

  Rng rng = make_rng(rng_seed);
  std::vector<NodeId> negatives;
  negatives.reserve(positives.size());
  for (std::size_t i : sample_without_replacement(unlabeled.size(), positives.size(), rng)) {
    negatives.push_back(unlabeled[i]);
  }

  std::vector<std::uint8_t> keep(graph.node_count(), 0);
  auto include_with_neighbors = [&](NodeId v) {
    keep[v] = 1;
    for (const Neighbor& n : graph.neighbors(v)) keep[n.node] = 1;
  };
  for (NodeId v : positives) include_with_neighbors(v);
  for (NodeId v : negatives) include_with_neighbors(v);

  SubnetworkSample sample;
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    if (keep[v]) sample.parent_ids.push_back(v);
  }
  sample.graph = induced_subgraph(graph, sample.parent_ids);
  std::vector<NodeId> to_local(graph.node_count(), 0);
  for (std::size_t i = 0; i < sample.parent_ids.size(); ++i) to_local[sample.parent_ids[i]] = static_cast<NodeId>(i);
  for (NodeId v : positives) sample.seed_positives.push_back(to_local[v]);
  for (NodeId v : negatives) sample.seed_negatives.push_back(to_local[v]);
  std::sort(sample.seed_negatives.begin(), sample.seed_negatives.end());
  sample.rng_seed = rng_seed;
  sample.parent_dataset_id = std::move(parent_dataset_id);
  return sample;
}

// edges.csv (external ids) plus seeds.csv with role pos|neg.
inline void write_subnetwork(const std::filesystem::path& dir, const SubnetworkSample& sample) {
  std::filesystem::create_directories(dir);
  {
    auto out = detail::open_output(dir / "edges.csv");
    write_edge_list(out, sample.graph);
  }
  auto out = detail::open_output(dir / "seeds.csv");
  out << "id,role\n";
  for (NodeId v : sample.seed_positives) out << sample.graph.external_id(v) << ",pos\n";
  for (NodeId v : sample.seed_negatives) out << sample.graph.external_id(v) << ",neg\n";
}

}  // namespace pugraph
