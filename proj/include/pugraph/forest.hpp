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
#include "pugraph/parallel.hpp"
#include "pugraph/rng.hpp"

namespace pugraph {

struct ForestConfig {
  std::size_t n_trees = 100;
  std::size_t max_depth = 16;
  std::size_t min_samples_split = 2;
  std::size_t max_features = 0;  // 0 selects floor(sqrt(d))
  std::size_t jobs = 1;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // go left when x[feature] <= threshold
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint8_t vote = 0;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  std::uint8_t vote(std::span<const double> x) const {
    std::size_t i = 0;
    while (nodes_[i].feature >= 0) {
      const auto& n = nodes_[i];
      i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes_[i].vote;
  }

  const std::vector<TreeNode>& nodes() const { return nodes_; }

 private:
  std::vector<TreeNode> nodes_;
};

namespace detail {

class TreeGrower {
 public:
  TreeGrower(const Matrix& x, std::span<const std::uint8_t> labels, const ForestConfig& cfg, Rng& rng)
      : x_(x), labels_(labels), cfg_(cfg), rng_(rng) {
    const auto d = static_cast<std::size_t>(x.cols());
    features_per_split_ = cfg.max_features > 0 ? std::min(cfg.max_features, d)
                                               : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));
  }

  DecisionTree grow(std::vector<std::size_t> rows) {
    nodes_.clear();
    build(rows, 0);
    return DecisionTree(std::move(nodes_));
  }

 private:
  static double gini(double pos, double total) {
    if (total <= 0.0) return 0.0;
    const double p = pos / total;
    return 2.0 * p * (1.0 - p);
  }

  std::int32_t build(std::vector<std::size_t>& rows, std::size_t depth) {
    const auto index = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();
    double pos = 0.0;
    for (std::size_t r : rows) pos += labels_[r];
    const double total = static_cast<double>(rows.size());
    nodes_[index].vote = pos * 2.0 > total ? 1 : 0;
    if (depth >= cfg_.max_depth || rows.size() < cfg_.min_samples_split || pos == 0.0 || pos == total) return index;

    const double parent = gini(pos, total);
    double best_gain = 1e-12;
    std::int32_t best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::pair<double, std::uint8_t>> column(rows.size());
    for (std::size_t f : sample_without_replacement(static_cast<std::size_t>(x_.cols()), features_per_split_, rng_)) {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        column[i] = {x_(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(f)), labels_[rows[i]]};
      }
      std::sort(column.begin(), column.end());
      double left_pos = 0.0;
      for (std::size_t i = 0; i + 1 < column.size(); ++i) {
        left_pos += column[i].second;
        if (column[i].first == column[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1), nr = total - nl;
        const double child = (nl * gini(left_pos, nl) + nr * gini(pos - left_pos, nr)) / total;
        const double gain = parent - child;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<std::int32_t>(f);
          best_threshold = 0.5 * (column[i].first + column[i + 1].first);
        }
      }
    }
    if (best_feature < 0) return index;

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) {
      (x_(static_cast<Eigen::Index>(r), best_feature) <= best_threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    nodes_[index].feature = best_feature;
    nodes_[index].threshold = best_threshold;
    const auto l = build(left, depth + 1);
    const auto r = build(right, depth + 1);
    nodes_[index].left = l;
    nodes_[index].right = r;
    return index;
  }

  const Matrix& x_;
  std::span<const std::uint8_t> labels_;
  const ForestConfig& cfg_;
  Rng& rng_;
  std::size_t features_per_split_ = 1;
  std::vector<TreeNode> nodes_;
};

}  // namespace detail

// Bootstrap-aggregated gini trees; score = fraction of trees voting positive.
class RandomForest : public ScoredModel {
 public:
  RandomForest(std::size_t dim, std::vector<DecisionTree> trees) : dim_(dim), trees_(std::move(trees)) {}

  ModelKind kind() const override { return ModelKind::random_forest; }
  std::size_t dim() const override { return dim_; }

  double score(std::span<const double> x) const override {
    if (trees_.empty()) return 0.0;
    double votes = 0.0;
    for (const auto& t : trees_) votes += t.vote(x);
    return votes / static_cast<double>(trees_.size());
  }

  const std::vector<DecisionTree>& trees() const { return trees_; }

  void write(std::ostream& out) const override {
    out << "kind random_forest\ndim " << dim_ << "\ntrees " << trees_.size() << '\n';
    for (const auto& t : trees_) {
      out << "tree " << t.nodes().size() << '\n';
      for (const auto& n : t.nodes()) {
        out << n.feature << ' ' << n.threshold << ' ' << n.left << ' ' << n.right << ' ' << int(n.vote) << '\n';
      }
    }
  }

  static std::shared_ptr<const RandomForest> read_body(std::istream& in) {
    const auto dim = detail::read_value<std::size_t>(in, "dim");
    const auto count = detail::read_value<std::size_t>(in, "trees");
    std::vector<DecisionTree> trees;
    for (std::size_t t = 0; t < count; ++t) {
      const auto size = detail::read_value<std::size_t>(in, "tree");
      std::vector<TreeNode> nodes(size);
      for (auto& n : nodes) {
        int vote = 0;
        if (!(in >> n.feature >> n.threshold >> n.left >> n.right >> vote)) throw IoError("model file: bad tree node");
        n.vote = static_cast<std::uint8_t>(vote);
      }
      trees.emplace_back(std::move(nodes));
    }
    return std::make_shared<RandomForest>(dim, std::move(trees));
  }

 private:
  std::size_t dim_;
  std::vector<DecisionTree> trees_;
};

inline std::shared_ptr<const RandomForest> fit_random_forest(const Matrix& features, std::span<const std::uint8_t> labels,
                                                             const ForestConfig& cfg, std::uint64_t seed) {
  require_rows_match(features, labels);
  require_both_classes(labels);
  if (cfg.n_trees == 0) throw ConfigError("n_trees", "must be >= 1");
  std::vector<DecisionTree> trees(cfg.n_trees);
  const std::size_t n = labels.size();
  parallel_for(cfg.n_trees, cfg.jobs, [&](std::size_t t) {
    Rng rng = make_rng(derive_seed(seed, t));
    std::vector<std::size_t> rows(n);
    for (auto& r : rows) r = uniform_index(rng, n);
    detail::TreeGrower grower(features, labels, cfg, rng);
    trees[t] = grower.grow(std::move(rows));
  });
  return std::make_shared<RandomForest>(static_cast<std::size_t>(features.cols()), std::move(trees));
}

inline std::shared_ptr<const RandomForest> fit_random_forest(const PuDataset& train, const ForestConfig& cfg,
                                                             std::uint64_t seed) {
  return fit_random_forest(train.features, train.s, cfg, seed);
}

inline Trainer random_forest_trainer(ForestConfig cfg = {}) {
  return [cfg](const Matrix& x, std::span<const std::uint8_t> labels, std::uint64_t seed) -> ModelPtr {
    return fit_random_forest(x, labels, cfg, seed);
  };
}

}  // namespace pugraph
