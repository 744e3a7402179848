#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "pugraph/embedding.hpp"
#include "pugraph/error.hpp"
#include "pugraph/parallel.hpp"
#include "pugraph/rng.hpp"
#include "pugraph/walks.hpp"

namespace pugraph {

struct SkipGramConfig {
  std::size_t dim = 64;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;  // decays linearly to 1e-4 of this value
  std::uint64_t rng_seed = 0;
  // Lock-free parallel updates over corpus shards. Not reproducible.
  bool fast = false;
  std::size_t jobs = 1;

  void validate() const {
    if (dim == 0) throw ConfigError("dim", "must be >= 1");
    if (window == 0) throw ConfigError("window", "must be >= 1");
    if (epochs == 0) throw ConfigError("epochs", "must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate", "must be > 0");
  }
};

namespace detail {

template <bool Shared>
struct Cell {
  static double load(const double& x) {
    if constexpr (Shared) {
      return std::atomic_ref<const double>(x).load(std::memory_order_relaxed);
    } else {
      return x;
    }
  }
  static void store(double& x, double v) {
    if constexpr (Shared) {
      std::atomic_ref<double>(x).store(v, std::memory_order_relaxed);
    } else {
      x = v;
    }
  }
};

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Negative-sampling skip-gram over a shard of sequences. `input` holds the
// returned vectors, `output` the context vectors.
template <bool Shared>
void skipgram_pass(std::span<const std::vector<std::uint32_t>> corpus, std::span<const std::size_t> order,
                   std::vector<double>& input, std::vector<double>& output, const AliasTable& noise,
                   const SkipGramConfig& cfg, double total_tokens, double& processed, Rng& rng) {
  using C = Cell<Shared>;
  const std::size_t d = cfg.dim;
  std::vector<double> grad(d);
  const double floor_lr = cfg.learning_rate * 1e-4;
  for (std::size_t idx : order) {
    const auto& seq = corpus[idx];
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const double lr = std::max(floor_lr, cfg.learning_rate * (1.0 - processed / total_tokens));
      processed += 1.0;
      const std::size_t reduced = uniform_index(rng, cfg.window);
      const std::size_t span = cfg.window - reduced;
      const std::size_t lo = i >= span ? i - span : 0;
      const std::size_t hi = std::min(seq.size() - 1, i + span);
      double* center = input.data() + static_cast<std::size_t>(seq[i]) * d;
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j == i) continue;
        std::fill(grad.begin(), grad.end(), 0.0);
        const std::uint32_t context = seq[j];
        for (std::size_t k = 0; k <= cfg.negatives; ++k) {
          std::uint32_t target = context;
          double label = 1.0;
          if (k > 0) {
            target = static_cast<std::uint32_t>(noise.draw(rng));
            if (target == context) continue;
            label = 0.0;
          }
          double* out = output.data() + static_cast<std::size_t>(target) * d;
          double dot = 0.0;
          for (std::size_t t = 0; t < d; ++t) dot += C::load(center[t]) * C::load(out[t]);
          const double g = (label - sigmoid(dot)) * lr;
          for (std::size_t t = 0; t < d; ++t) {
            grad[t] += g * C::load(out[t]);
            C::store(out[t], C::load(out[t]) + g * C::load(center[t]));
          }
        }
        for (std::size_t t = 0; t < d; ++t) C::store(center[t], C::load(center[t]) + grad[t]);
      }
    }
  }
}

}  // namespace detail

// Trains vectors for tokens [0, vocab_size). Tokens never seen in the
// corpus keep their random initialization.
inline Matrix train_skipgram_tokens(std::span<const std::vector<std::uint32_t>> corpus, std::size_t vocab_size,
                                    const SkipGramConfig& cfg) {
  cfg.validate();
  if (corpus.empty()) throw ConfigError("corpus", "must not be empty");
  const std::size_t d = cfg.dim;
  Rng init_rng = make_rng(derive_seed(cfg.rng_seed, 0));
  std::vector<double> input(vocab_size * d), output(vocab_size * d, 0.0);
  for (double& x : input) x = (uniform_unit(init_rng) - 0.5) / static_cast<double>(d);

  std::vector<double> counts(vocab_size, 0.0);
  double total_tokens = 0.0;
  for (const auto& seq : corpus) {
    for (std::uint32_t t : seq) {
      if (t >= vocab_size) throw DimensionError("token id outside vocabulary");
      counts[t] += 1.0;
    }
    total_tokens += static_cast<double>(seq.size());
  }
  for (double& c : counts) c = std::pow(c, 0.75);
  const AliasTable noise(counts);
  total_tokens *= static_cast<double>(cfg.epochs);

  std::vector<std::size_t> order(corpus.size());
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = make_rng(derive_seed(cfg.rng_seed, {1, e}));
    shuffle(order, rng);
    const double before = total_tokens * static_cast<double>(e) / static_cast<double>(cfg.epochs);
    if (!cfg.fast || cfg.jobs <= 1) {
      double processed = before;
      detail::skipgram_pass<false>(corpus, order, input, output, noise, cfg, total_tokens, processed, rng);
      continue;
    }
    const std::size_t shards = cfg.jobs;
    parallel_for(shards, cfg.jobs, [&](std::size_t s) {
      const std::size_t lo = order.size() * s / shards;
      const std::size_t hi = order.size() * (s + 1) / shards;
      Rng shard_rng = make_rng(derive_seed(cfg.rng_seed, {2, e, s}));
      double processed = before / static_cast<double>(shards);
      detail::skipgram_pass<true>(corpus, std::span<const std::size_t>(order).subspan(lo, hi - lo), input, output,
                                  noise, cfg, total_tokens / static_cast<double>(shards), processed, shard_rng);
    });
  }
  return Eigen::Map<Matrix>(input.data(), static_cast<Eigen::Index>(vocab_size), static_cast<Eigen::Index>(d));
}

inline EmbeddingMatrix train_skipgram(const std::vector<Walk>& corpus, const TransactionGraph& graph,
                                      const SkipGramConfig& cfg) {
  return EmbeddingMatrix::for_graph(graph, train_skipgram_tokens(corpus, graph.node_count(), cfg), "skipgram");
}

struct Node2VecConfig {
  WalkConfig walk;
  SkipGramConfig skipgram;
};

inline EmbeddingMatrix train_node2vec(const TransactionGraph& graph, const Node2VecConfig& cfg, std::size_t jobs = 1) {
  auto emb = train_skipgram(generate_walks(graph, cfg.walk, jobs), graph, cfg.skipgram);
  emb.method_tag = "node2vec";
  return emb;
}

}  // namespace pugraph
