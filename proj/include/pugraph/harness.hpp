#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "pugraph/config.hpp"
#include "pugraph/dataset.hpp"
#include "pugraph/embedding.hpp"
#include "pugraph/forest.hpp"
#include "pugraph/graph_io.hpp"
#include "pugraph/linear.hpp"
#include "pugraph/metrics.hpp"
#include "pugraph/mnmf.hpp"
#include "pugraph/parallel.hpp"
#include "pugraph/poincare.hpp"
#include "pugraph/pu_learn.hpp"
#include "pugraph/role2vec.hpp"
#include "pugraph/skipgram.hpp"
#include "pugraph/subnetwork.hpp"
#include "pugraph/synthetic.hpp"

namespace pugraph {

// ---------------------------------------------------------------------------
// Datasets
// ---------------------------------------------------------------------------

struct LoadedDataset {
  TransactionGraph graph;
  LabelStore labels;
  std::string id;
  std::vector<std::string> warnings;
};

inline LoadedDataset load_dataset(const DatasetSource& source, std::uint64_t seed) {
  LoadedDataset out;
  if (source.synthetic) {
    auto data = generate_synthetic(*source.synthetic, seed);
    out.graph = std::move(data.graph);
    out.labels = std::move(data.labels);
    out.id = source.id.empty() ? "synthetic" : source.id;
  } else if (!source.snapshot.empty()) {
    auto snap = read_snapshot(source.snapshot);
    out.graph = std::move(snap.graph);
    out.labels = std::move(snap.labels);
    out.id = source.id.empty() ? source.snapshot.filename().string() : source.id;
  } else {
    out.graph = load_edge_list(source.edges, format_from_path(source.edges), source.directed);
    auto loaded = load_labels(source.labels, out.graph);
    out.labels = std::move(loaded.labels);
    out.warnings = std::move(loaded.warnings);
    out.id = source.id.empty() ? source.edges.stem().string() : source.id;
  }
  return out;
}

// Hides `hide_count` labeled positives chosen uniformly: y becomes the
// original s and the chosen rows get s = 0. The chosen set is the first
// hide_count entries of one seeded shuffle, so hidden sets are nested in
// hide_count for a fixed seed. Hidden rows are exactly y = 1, s = 0.
inline PuDataset engineer_pu_dataset(const PuDataset& data, std::size_t hide_count, std::uint64_t seed) {
  std::vector<std::size_t> positives;
  for (std::size_t i = 0; i < data.s.size(); ++i) {
    if (data.s[i]) positives.push_back(i);
  }
  if (hide_count > positives.size()) {
    throw SamplingError("cannot hide " + std::to_string(hide_count) + " of " + std::to_string(positives.size()) +
                        " labeled positives");
  }
  Rng rng = make_rng(seed);
  shuffle(positives, rng);
  PuDataset out = data;
  out.y = data.s;
  for (std::size_t k = 0; k < hide_count; ++k) out.s[positives[k]] = 0;
  return out;
}

// ---------------------------------------------------------------------------
// Embeddings and models built from configuration
// ---------------------------------------------------------------------------

inline EmbeddingMatrix train_embedding(EmbeddingMethod method, const TransactionGraph& graph, const EmbeddingOptions& o,
                                       std::uint64_t seed) {
  WalkConfig walk;
  walk.p = o.p;
  walk.q = o.q;
  walk.walk_length = o.walk_length;
  walk.walks_per_node = o.walks_per_node;
  walk.rng_seed = derive_seed(seed, 0);
  SkipGramConfig sg;
  sg.dim = o.dim;
  sg.window = o.window;
  sg.negatives = o.negatives;
  sg.epochs = o.skipgram_epochs;
  sg.rng_seed = derive_seed(seed, 1);
  switch (method) {
    case EmbeddingMethod::node2vec:
      return train_node2vec(graph, {walk, sg});
    case EmbeddingMethod::role2vec:
      return train_role2vec(graph, {walk, sg, 4});
    case EmbeddingMethod::poincare: {
      PoincareConfig cfg;
      cfg.dim = o.dim;
      cfg.epochs = o.poincare_epochs;
      cfg.negatives = o.poincare_negatives;
      cfg.rng_seed = seed;
      return train_poincare(graph, cfg).as_embedding();
    }
    case EmbeddingMethod::mnmf: {
      MnmfConfig cfg;
      cfg.dim = o.dim;
      cfg.communities = o.mnmf_communities;
      cfg.iterations = o.mnmf_iterations;
      cfg.rng_seed = seed;
      return train_mnmf(graph, cfg).embedding;
    }
  }
  throw ConfigError("embeddings", "unhandled embedding method");
}

namespace detail {

inline Trainer base_trainer_named(const std::string& name, const ModelOptions& o, const char* key) {
  if (name == "logreg") return logreg_trainer();
  if (name == "linear_svm") {
    LinearSvmConfig cfg;
    cfg.c_reg = o.svm_c;
    return linear_svm_trainer(cfg);
  }
  if (name == "random_forest") {
    ForestConfig cfg;
    cfg.n_trees = o.forest_trees;
    cfg.max_depth = o.forest_max_depth;
    return random_forest_trainer(cfg);
  }
  throw ConfigError(key, "base model must be logreg, linear_svm or random_forest, got '" + name + "'");
}

}  // namespace detail

inline Trainer make_trainer(ModelKind kind, const ModelOptions& o) {
  switch (kind) {
    case ModelKind::logreg:
    case ModelKind::linear_svm:
    case ModelKind::random_forest:
      return detail::base_trainer_named(to_string(kind), o, "models");
    case ModelKind::elkanoto: {
      ElkanotoConfig cfg;
      cfg.holdout_fraction = o.elkanoto_holdout;
      return elkanoto_trainer(detail::base_trainer_named(o.elkanoto_base, o, "model.elkanoto_base"), cfg);
    }
    case ModelKind::bagging_pu: {
      BaggingConfig cfg;
      cfg.rounds = o.bagging_rounds;
      return bagging_pu_trainer(detail::base_trainer_named(o.bagging_base, o, "model.bagging_base"), cfg);
    }
    case ModelKind::upu: {
      UpuConfig cfg;
      cfg.epochs = o.upu_epochs;
      cfg.prior = o.upu_prior;
      return upu_trainer(cfg);
    }
  }
  throw ConfigError("models", "unhandled model kind");
}

// ---------------------------------------------------------------------------
// Per-repeat pipeline
// ---------------------------------------------------------------------------

// Seed layout for repeat r of a run with seed S: R = derive_seed(S, r + 1)
// (derive_seed(S, 0) generates the dataset). Below R: 0 subnetwork,
// {1, method} embedding, 2 hidden set, 3 split, {4, model kind} model fit,
// 5 class-prior estimate.
inline std::uint64_t repeat_seed(std::uint64_t run_seed, std::size_t repeat) { return derive_seed(run_seed, repeat + 1); }
inline std::uint64_t dataset_seed(std::uint64_t run_seed) { return derive_seed(run_seed, 0); }

// Trained embeddings of one subnetwork, keyed by base method; concatenations
// are assembled from these so each method trains once per repeat.
struct SubnetworkFeatures {
  SubnetworkSample sample;
  std::map<EmbeddingMethod, EmbeddingMatrix> base;
  std::map<EmbeddingMethod, double> seconds;

  // Seed rows (positives first) of the requested feature set, with s = 1 on
  // the seed positives.
  PuDataset seed_dataset(const EmbeddingSpec& spec) const {
    EmbeddingMatrix emb = base.at(spec.parts.front());
    for (std::size_t i = 1; i < spec.parts.size(); ++i) emb = concat_embeddings(emb, base.at(spec.parts[i]));
    const auto seeds = sample.seeds();
    PuDataset d;
    d.features.resize(static_cast<Eigen::Index>(seeds.size()), emb.vectors.cols());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      d.features.row(static_cast<Eigen::Index>(i)) = emb.vectors.row(static_cast<Eigen::Index>(seeds[i]));
      d.s.push_back(i < sample.seed_positives.size() ? 1 : 0);
    }
    d.y = d.s;
    return d;
  }
};

inline SubnetworkFeatures prepare_subnetwork(const LoadedDataset& data, const std::vector<EmbeddingSpec>& specs,
                                             const EmbeddingOptions& options, std::uint64_t rseed) {
  SubnetworkFeatures f;
  f.sample = sample_subnetwork(data.graph, data.labels, derive_seed(rseed, 0), data.id);
  for (const auto& spec : specs) {
    for (EmbeddingMethod m : spec.parts) {
      if (f.base.count(m)) continue;
      const auto start = std::chrono::steady_clock::now();
      f.base.emplace(m, train_embedding(m, f.sample.graph, options, derive_seed(rseed, {1, static_cast<std::uint64_t>(m)})));
      f.seconds[m] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  }
  return f;
}

struct CellOutcome {
  MetricsReport estimated;
  MetricsReport defacto;
  double fit_seconds = 0.0;
  std::optional<double> c_hat;  // Elkanoto models only
};

// Split `data` (stratified by s), fit on the training part, and score the
// test part against s and y.
inline CellOutcome evaluate_model(ModelKind kind, const ModelOptions& options, const PuDataset& data, const SplitIndices& split,
                                  double threshold, std::uint64_t seed) {
  const PuDataset train = data.subset(split.train, SplitTag::train);
  const PuDataset test = data.subset(split.test, SplitTag::test);
  const auto start = std::chrono::steady_clock::now();
  const ModelPtr model = make_trainer(kind, options)(train.features, train.s, seed);
  CellOutcome out;
  out.fit_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (const auto* el = dynamic_cast<const ElkanotoModel*>(model.get())) out.c_hat = el->c_hat();
  const auto pred = predict(*model, test.features, threshold);
  std::tie(out.estimated, out.defacto) = estimated_vs_defacto(pred.labels, test.s, test.y);
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 for a single value
};

inline Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

// Per-repeat outcomes of one (row, model) cell; summaries are taken per
// metric and variant.
struct CellSeries {
  std::vector<CellOutcome> repeats;

  Summary summary(std::size_t metric, MetricVariant variant) const {
    std::vector<double> v;
    for (const auto& r : repeats) v.push_back(metric_value(variant == MetricVariant::estimated ? r.estimated : r.defacto, metric));
    return summarize(v);
  }
};

struct RepeatRecord {
  std::uint64_t seed = 0;
  std::size_t subnetwork_nodes = 0;
  std::size_t subnetwork_edges = 0;
  std::size_t seed_positives = 0;
  std::size_t seed_negatives = 0;
  std::map<std::string, double> embedding_seconds;
  std::map<std::string, PriorEstimate> prior;  // by feature-set name, from the training split
};

// ---------------------------------------------------------------------------
// Benchmark matrix
// ---------------------------------------------------------------------------

struct BenchmarkResult {
  std::vector<EmbeddingSpec> embeddings;
  std::vector<ModelKind> models;
  std::vector<std::vector<CellSeries>> cells;  // [embedding][model]
  std::vector<RepeatRecord> repeats;
  std::uint64_t seed = 0;
  std::string dataset_id;
  std::size_t hide_count = 0;
  double seconds = 0.0;
};

inline std::size_t hidden_count_for(std::size_t positives, double hide_fraction) {
  return static_cast<std::size_t>(std::llround(hide_fraction * static_cast<double>(positives)));
}

// Every repeat samples a subnetwork, trains each embedding once, hides
// round(hide_fraction * positives) seed positives, splits once per feature
// set (stratified by s), and fits every model on that split.
inline BenchmarkResult run_benchmark(const ExperimentConfig& cfg, const LoadedDataset& data, std::uint64_t seed) {
  cfg.validate();
  if (cfg.embeddings.empty()) throw ConfigError("embeddings", "at least one embedding is required");
  if (cfg.models.empty()) throw ConfigError("models", "at least one model is required");
  const auto start = std::chrono::steady_clock::now();
  BenchmarkResult result;
  result.embeddings = cfg.embeddings;
  result.models = cfg.models;
  result.seed = seed;
  result.dataset_id = data.id;
  result.repeats.resize(cfg.repeats);
  std::vector<std::vector<std::vector<CellOutcome>>> outcomes(
      cfg.repeats, std::vector<std::vector<CellOutcome>>(cfg.embeddings.size(), std::vector<CellOutcome>(cfg.models.size())));

  parallel_for(cfg.repeats, cfg.jobs, [&](std::size_t r) {
    const std::uint64_t rseed = repeat_seed(seed, r);
    const auto features = prepare_subnetwork(data, cfg.embeddings, cfg.embedding, rseed);
    auto& record = result.repeats[r];
    record.seed = rseed;
    record.subnetwork_nodes = features.sample.graph.node_count();
    record.subnetwork_edges = features.sample.graph.edge_count();
    record.seed_positives = features.sample.seed_positives.size();
    record.seed_negatives = features.sample.seed_negatives.size();
    for (const auto& [m, secs] : features.seconds) record.embedding_seconds[to_string(m)] = secs;
    const std::size_t hide = hidden_count_for(features.sample.seed_positives.size(), cfg.hide_fraction);
    for (std::size_t e = 0; e < cfg.embeddings.size(); ++e) {
      const PuDataset pu = engineer_pu_dataset(features.seed_dataset(cfg.embeddings[e]), hide, derive_seed(rseed, 2));
      const auto split = stratified_split(pu.s, cfg.train_fraction, derive_seed(rseed, 3));
      const PuDataset train = pu.subset(split.train);
      record.prior[cfg.embeddings[e].name()] = estimate_class_prior(train, derive_seed(rseed, 5));
      for (std::size_t m = 0; m < cfg.models.size(); ++m) {
        outcomes[r][e][m] = evaluate_model(cfg.models[m], cfg.model, pu, split, cfg.threshold,
                                           derive_seed(rseed, {4, static_cast<std::uint64_t>(cfg.models[m])}));
      }
    }
  });

  result.cells.assign(cfg.embeddings.size(), std::vector<CellSeries>(cfg.models.size()));
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    for (std::size_t e = 0; e < cfg.embeddings.size(); ++e) {
      for (std::size_t m = 0; m < cfg.models.size(); ++m) result.cells[e][m].repeats.push_back(outcomes[r][e][m]);
    }
  }
  if (!result.repeats.empty()) {
    result.hide_count = hidden_count_for(result.repeats.front().seed_positives, cfg.hide_fraction);
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// ---------------------------------------------------------------------------
// Hidden-positive sweep
// ---------------------------------------------------------------------------

struct SweepResult {
  std::vector<EmbeddingSpec> embeddings;
  std::vector<ModelKind> models;
  std::vector<std::size_t> hide_counts;
  std::vector<std::vector<std::vector<CellSeries>>> cells;  // [embedding][hide][model]
  std::vector<RepeatRecord> repeats;
  std::uint64_t seed = 0;
  std::string dataset_id;
  double seconds = 0.0;
};

// Each repeat fixes one subnetwork and its embeddings; only the hidden set
// varies across hide_counts (nested, from one shuffle per repeat).
inline SweepResult run_hidden_positive_sweep(const ExperimentConfig& cfg, const LoadedDataset& data, std::uint64_t seed) {
  cfg.validate();
  if (cfg.hide_counts.empty()) throw ConfigError("hide_counts", "the sweep needs at least one hide count");
  const std::vector<EmbeddingSpec> embeddings =
      cfg.embeddings.empty() ? std::vector<EmbeddingSpec>{EmbeddingSpec{{EmbeddingMethod::node2vec}}} : cfg.embeddings;
  const std::vector<ModelKind> models =
      cfg.models.empty() ? std::vector<ModelKind>{ModelKind::logreg, ModelKind::linear_svm} : cfg.models;
  const auto start = std::chrono::steady_clock::now();
  SweepResult result;
  result.embeddings = embeddings;
  result.models = models;
  result.hide_counts = cfg.hide_counts;
  result.seed = seed;
  result.dataset_id = data.id;
  result.repeats.resize(cfg.repeats);
  const std::size_t nh = cfg.hide_counts.size();
  std::vector<std::vector<std::vector<std::vector<CellOutcome>>>> outcomes(
      cfg.repeats, std::vector<std::vector<std::vector<CellOutcome>>>(
                       embeddings.size(), std::vector<std::vector<CellOutcome>>(nh, std::vector<CellOutcome>(models.size()))));

  parallel_for(cfg.repeats, cfg.jobs, [&](std::size_t r) {
    const std::uint64_t rseed = repeat_seed(seed, r);
    const auto features = prepare_subnetwork(data, embeddings, cfg.embedding, rseed);
    auto& record = result.repeats[r];
    record.seed = rseed;
    record.subnetwork_nodes = features.sample.graph.node_count();
    record.subnetwork_edges = features.sample.graph.edge_count();
    record.seed_positives = features.sample.seed_positives.size();
    record.seed_negatives = features.sample.seed_negatives.size();
    for (const auto& [m, secs] : features.seconds) record.embedding_seconds[to_string(m)] = secs;
    for (std::size_t e = 0; e < embeddings.size(); ++e) {
      const PuDataset full = features.seed_dataset(embeddings[e]);
      for (std::size_t h = 0; h < nh; ++h) {
        const PuDataset pu = engineer_pu_dataset(full, cfg.hide_counts[h], derive_seed(rseed, 2));
        const auto split = stratified_split(pu.s, cfg.train_fraction, derive_seed(rseed, 3));
        record.prior[embeddings[e].name() + "@" + std::to_string(cfg.hide_counts[h])] =
            estimate_class_prior(pu.subset(split.train), derive_seed(rseed, 5));
        for (std::size_t m = 0; m < models.size(); ++m) {
          outcomes[r][e][h][m] = evaluate_model(models[m], cfg.model, pu, split, cfg.threshold,
                                                derive_seed(rseed, {4, static_cast<std::uint64_t>(models[m])}));
        }
      }
    }
  });

  result.cells.assign(embeddings.size(),
                      std::vector<std::vector<CellSeries>>(nh, std::vector<CellSeries>(models.size())));
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    for (std::size_t e = 0; e < embeddings.size(); ++e) {
      for (std::size_t h = 0; h < nh; ++h) {
        for (std::size_t m = 0; m < models.size(); ++m) result.cells[e][h][m].repeats.push_back(outcomes[r][e][h][m]);
      }
    }
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// ---------------------------------------------------------------------------
// Output files
// ---------------------------------------------------------------------------

// Writes through a temporary sibling and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

namespace detail {

inline std::string fixed(double v, int digits = 6) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

constexpr MetricVariant kVariants[] = {MetricVariant::estimated, MetricVariant::defacto};

inline nlohmann::json repeats_json(const std::vector<RepeatRecord>& repeats) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t r = 0; r < repeats.size(); ++r) {
    const auto& rec = repeats[r];
    nlohmann::json priors = nlohmann::json::object();
    for (const auto& [name, est] : rec.prior) priors[name] = {{"c_hat", est.c_hat}, {"pi_hat", est.prior}};
    out.push_back({{"repeat", r},
                   {"seed", rec.seed},
                   {"subnetwork_nodes", rec.subnetwork_nodes},
                   {"subnetwork_edges", rec.subnetwork_edges},
                   {"seed_positives", rec.seed_positives},
                   {"seed_negatives", rec.seed_negatives},
                   {"class_prior", priors},
                   {"embedding_seconds", rec.embedding_seconds}});
  }
  return out;
}

}  // namespace detail

// One row per (embedding, model, metric, variant) with mean and sd over
// repeats. Deterministic for a fixed seed (no timings).
inline std::string matrix_csv(const BenchmarkResult& b) {
  std::ostringstream out;
  out << "embedding,model,metric,variant,mean,sd,repeats\n";
  for (std::size_t e = 0; e < b.embeddings.size(); ++e) {
    for (std::size_t m = 0; m < b.models.size(); ++m) {
      for (std::size_t k = 0; k < std::size(kMetricNames); ++k) {
        for (auto v : detail::kVariants) {
          const auto s = b.cells[e][m].summary(k, v);
          out << b.embeddings[e].name() << ',' << to_string(b.models[m]) << ',' << kMetricNames[k] << ',' << to_string(v)
              << ',' << detail::fixed(s.mean) << ',' << detail::fixed(s.sd) << ',' << b.cells[e][m].repeats.size() << '\n';
        }
      }
    }
  }
  return out.str();
}

// One table per (variant, metric): embeddings down, models across.
inline std::string matrix_markdown(const BenchmarkResult& b) {
  std::ostringstream out;
  out << "# Benchmark matrix\n\nDataset `" << b.dataset_id << "`, seed " << b.seed << ", "
      << (b.cells.empty() || b.cells[0].empty() ? 0 : b.cells[0][0].repeats.size()) << " repeats, " << b.hide_count
      << " hidden positives per repeat. Cells are mean ± sd.\n";
  for (auto v : detail::kVariants) {
    for (std::size_t k = 0; k < std::size(kMetricNames); ++k) {
      out << "\n## " << kMetricNames[k] << " (" << to_string(v) << ")\n\n| embedding |";
      for (auto m : b.models) out << ' ' << to_string(m) << " |";
      out << "\n|---|";
      for (std::size_t m = 0; m < b.models.size(); ++m) out << "---:|";
      out << '\n';
      for (std::size_t e = 0; e < b.embeddings.size(); ++e) {
        out << "| " << b.embeddings[e].name() << " |";
        for (std::size_t m = 0; m < b.models.size(); ++m) {
          const auto s = b.cells[e][m].summary(k, v);
          out << ' ' << detail::fixed(s.mean, 3) << " ± " << detail::fixed(s.sd, 3) << " |";
        }
        out << '\n';
      }
    }
  }
  return out.str();
}

inline nlohmann::json benchmark_metadata(const BenchmarkResult& b) {
  nlohmann::json elkanoto = nlohmann::json::array();
  nlohmann::json fit_seconds = nlohmann::json::object();
  for (std::size_t e = 0; e < b.embeddings.size(); ++e) {
    for (std::size_t m = 0; m < b.models.size(); ++m) {
      double total = 0.0;
      std::vector<double> c_hats;
      for (const auto& r : b.cells[e][m].repeats) {
        total += r.fit_seconds;
        if (r.c_hat) c_hats.push_back(*r.c_hat);
      }
      fit_seconds[b.embeddings[e].name() + "/" + to_string(b.models[m])] = total;
      if (!c_hats.empty()) elkanoto.push_back({{"embedding", b.embeddings[e].name()}, {"c_hat", c_hats}});
    }
  }
  std::vector<std::string> embeddings, models;
  for (const auto& e : b.embeddings) embeddings.push_back(e.name());
  for (auto m : b.models) models.push_back(to_string(m));
  return {{"kind", "benchmark"},
          {"dataset", b.dataset_id},
          {"seed", b.seed},
          {"embeddings", embeddings},
          {"models", models},
          {"hidden_positives", b.hide_count},
          {"repeats", detail::repeats_json(b.repeats)},
          {"elkanoto_c_hat", elkanoto},
          {"timings", {{"total_seconds", b.seconds}, {"fit_seconds", fit_seconds}}}};
}

// One row per (embedding, hide_count, model, metric, variant).
inline std::string sweep_csv(const SweepResult& s) {
  std::ostringstream out;
  out << "embedding,hide_count,model,metric,variant,mean,sd,repeats\n";
  for (std::size_t e = 0; e < s.embeddings.size(); ++e) {
    for (std::size_t h = 0; h < s.hide_counts.size(); ++h) {
      for (std::size_t m = 0; m < s.models.size(); ++m) {
        for (std::size_t k = 0; k < std::size(kMetricNames); ++k) {
          for (auto v : detail::kVariants) {
            const auto sum = s.cells[e][h][m].summary(k, v);
            out << s.embeddings[e].name() << ',' << s.hide_counts[h] << ',' << to_string(s.models[m]) << ','
                << kMetricNames[k] << ',' << to_string(v) << ',' << detail::fixed(sum.mean) << ',' << detail::fixed(sum.sd)
                << ',' << s.cells[e][h][m].repeats.size() << '\n';
          }
        }
      }
    }
  }
  return out.str();
}

// Per (embedding, model): hide counts down, estimated/defacto pairs across.
inline std::string sweep_markdown(const SweepResult& s) {
  std::ostringstream out;
  out << "# Hidden-positive sweep\n\nDataset `" << s.dataset_id << "`, seed " << s.seed << ". Means over repeats.\n";
  for (std::size_t e = 0; e < s.embeddings.size(); ++e) {
    for (std::size_t m = 0; m < s.models.size(); ++m) {
      out << "\n## " << s.embeddings[e].name() << " / " << to_string(s.models[m]) << "\n\n| hidden |";
      for (const char* name : kMetricNames) out << ' ' << name << " | " << name << " defacto |";
      out << "\n|---:|";
      for (std::size_t k = 0; k < 2 * std::size(kMetricNames); ++k) out << "---:|";
      out << '\n';
      for (std::size_t h = 0; h < s.hide_counts.size(); ++h) {
        out << "| " << s.hide_counts[h] << " |";
        for (std::size_t k = 0; k < std::size(kMetricNames); ++k) {
          for (auto v : detail::kVariants) out << ' ' << detail::fixed(s.cells[e][h][m].summary(k, v).mean, 3) << " |";
        }
        out << '\n';
      }
    }
  }
  return out.str();
}

inline nlohmann::json sweep_metadata(const SweepResult& s) {
  std::vector<std::string> embeddings, models;
  for (const auto& e : s.embeddings) embeddings.push_back(e.name());
  for (auto m : s.models) models.push_back(to_string(m));
  return {{"kind", "sweep"},
          {"dataset", s.dataset_id},
          {"seed", s.seed},
          {"embeddings", embeddings},
          {"models", models},
          {"hide_counts", s.hide_counts},
          {"repeats", detail::repeats_json(s.repeats)},
          {"timings", {{"total_seconds", s.seconds}}}};
}

}  // namespace pugraph
