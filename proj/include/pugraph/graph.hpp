#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pugraph/error.hpp"

namespace pugraph {

using NodeId = std::uint32_t;

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  NodeId node = 0;
  double weight = 1.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Immutable transaction network. Edges keep their stored direction; the
// adjacency is the undirected, weight-merged view every embedding uses.
class TransactionGraph {
 public:
  TransactionGraph() = default;

  std::size_t node_count() const { return external_ids_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool directed() const { return directed_; }
  std::span<const Edge> edges() const { return edges_; }

  // Neighbors sorted by node id.
  std::span<const Neighbor> neighbors(NodeId v) const {
    return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }

  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }

  double weighted_degree(NodeId v) const {
    double total = 0.0;
    for (const Neighbor& n : neighbors(v)) total += n.weight;
    return total;
  }

  // Undirected merged weight, 0 when u and v are not adjacent.
  double edge_weight(NodeId u, NodeId v) const {
    auto nbrs = neighbors(u);
    auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v,
                               [](const Neighbor& n, NodeId id) { return n.node < id; });
    return (it != nbrs.end() && it->node == v) ? it->weight : 0.0;
  }

  bool has_edge(NodeId u, NodeId v) const { return adjacent(u, v); }

  const std::string& external_id(NodeId v) const { return external_ids_[v]; }
  std::span<const std::string> external_ids() const { return external_ids_; }

  std::optional<NodeId> find(std::string_view external) const {
    auto it = index_.find(std::string(external));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const TransactionGraph& a, const TransactionGraph& b) {
    return a.directed_ == b.directed_ && a.external_ids_ == b.external_ids_ && a.edges_ == b.edges_;
  }

 private:
  friend class GraphBuilder;

  bool adjacent(NodeId u, NodeId v) const {
    auto nbrs = neighbors(u);
    return std::binary_search(nbrs.begin(), nbrs.end(), Neighbor{v, 0.0},
                              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
  }

  bool directed_ = false;
  std::vector<std::string> external_ids_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
};

// Accumulates nodes and edges, then freezes them into a TransactionGraph.
// Duplicate edges (same ordered pair when directed, same unordered pair
// otherwise) collapse into one edge carrying the summed weight.
class GraphBuilder {
 public:
  explicit GraphBuilder(bool directed = false) : directed_(directed) {}

  NodeId add_node(std::string_view external) {
    auto [it, inserted] = index_.try_emplace(std::string(external), static_cast<NodeId>(ids_.size()));
    if (inserted) ids_.emplace_back(external);
    return it->second;
  }

  // Adds nodes "0", "1", ... so dense ids equal their external names.
  void add_numbered_nodes(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) add_node(std::to_string(ids_.size()));
  }

  void add_edge(std::string_view src, std::string_view dst, double weight = 1.0) {
    const NodeId a = add_node(src);
    const NodeId b = add_node(dst);
    add_edge(a, b, weight);
  }

  void add_edge(NodeId src, NodeId dst, double weight = 1.0) {
    if (src >= ids_.size() || dst >= ids_.size()) {
      throw Error("graph", "edge endpoint out of range");
    }
    if (!(weight >= 0.0)) throw Error("graph", "edge weight must be nonnegative");
    if (!directed_ && dst < src) std::swap(src, dst);
    merged_[{src, dst}] += weight;
  }

  std::size_t node_count() const { return ids_.size(); }

  TransactionGraph build() const {
    TransactionGraph g;
    g.directed_ = directed_;
    g.external_ids_ = ids_;
    g.index_ = index_;
    g.edges_.reserve(merged_.size());
    for (const auto& [key, w] : merged_) g.edges_.push_back({key.first, key.second, w});

    const std::size_t n = ids_.size();
    std::vector<std::map<NodeId, double>> undirected(n);
    for (const Edge& e : g.edges_) {
      undirected[e.src][e.dst] += e.weight;
      if (e.src != e.dst) undirected[e.dst][e.src] += e.weight;
    }
    g.offsets_.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) g.offsets_[v + 1] = g.offsets_[v] + undirected[v].size();
    g.adjacency_.reserve(g.offsets_[n]);
    for (std::size_t v = 0; v < n; ++v) {
      for (const auto& [u, w] : undirected[v]) g.adjacency_.push_back({u, w});
    }
    return g;
  }

 private:
  bool directed_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, NodeId> index_;
  std::map<std::pair<NodeId, NodeId>, double> merged_;
};

// Observed labels s and, for engineered or synthetic data, true labels y.
struct LabelStore {
  std::vector<std::uint8_t> s;
  std::optional<std::vector<std::uint8_t>> y;

  static LabelStore unlabeled(std::size_t n) { return LabelStore{std::vector<std::uint8_t>(n, 0), std::nullopt}; }

  std::size_t size() const { return s.size(); }

  std::size_t labeled_count() const {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), std::uint8_t{1}));
  }

  std::size_t true_positive_count() const {
    return y ? static_cast<std::size_t>(std::count(y->begin(), y->end(), std::uint8_t{1})) : 0;
  }

  // Throws unless s=1 implies y=1 wherever y is present.
  void validate() const {
    if (!y) return;
    if (y->size() != s.size()) throw Error("labels", "s and y differ in length");
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] && !(*y)[i]) {
        throw Error("labels", "node " + std::to_string(i) + " is labeled but not a true positive");
      }
    }
  }
};

}  // namespace pugraph
