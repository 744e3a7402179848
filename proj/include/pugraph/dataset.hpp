#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pugraph/error.hpp"
#include "pugraph/matrix.hpp"
#include "pugraph/rng.hpp"

namespace pugraph {

enum class SplitTag { none, train, test };

// Features with observed labels s and, when known, true labels y.
// Learners read features and s only; y exists for evaluation.
struct PuDataset {
  Matrix features;
  std::vector<std::uint8_t> s;
  std::optional<std::vector<std::uint8_t>> y;
  SplitTag split = SplitTag::none;

  std::size_t size() const { return s.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }

  std::size_t labeled_count() const {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), std::uint8_t{1}));
  }

  void validate() const {
    if (static_cast<std::size_t>(features.rows()) != s.size()) {
      throw DimensionError("feature rows (" + std::to_string(features.rows()) + ") != label count (" +
                           std::to_string(s.size()) + ")");
    }
    if (y) {
      if (y->size() != s.size()) throw DimensionError("y and s differ in length");
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] && !(*y)[i]) throw Error("labels", "row " + std::to_string(i) + " has s=1 but y=0");
      }
    }
  }

  PuDataset subset(std::span<const std::size_t> rows, SplitTag tag = SplitTag::none) const {
    PuDataset out;
    out.features = select_rows(features, rows);
    out.s.reserve(rows.size());
    for (std::size_t r : rows) out.s.push_back(s[r]);
    if (y) {
      out.y.emplace();
      for (std::size_t r : rows) out.y->push_back((*y)[r]);
    }
    out.split = tag;
    return out;
  }
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per-class shuffle; round(train_fraction * class size) of each class goes
// to train. Both halves are returned in ascending row order.
inline SplitIndices stratified_split(std::span<const std::uint8_t> strata, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train_fraction", "must lie in (0, 1)");
  Rng rng = make_rng(seed);
  SplitIndices out;
  for (std::uint8_t cls : {std::uint8_t{1}, std::uint8_t{0}}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < strata.size(); ++i) {
      if (strata[i] == cls) members.push_back(i);
    }
    shuffle(members, rng);
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(members.size())));
    out.train.insert(out.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.insert(out.test.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train), members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace pugraph
