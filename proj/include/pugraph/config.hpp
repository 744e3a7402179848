#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <vector>

#include "json.hpp"

#include "pugraph/error.hpp"
#include "pugraph/model.hpp"
#include "pugraph/synthetic.hpp"

namespace pugraph {

enum class EmbeddingMethod { node2vec, poincare, role2vec, mnmf };

inline const char* to_string(EmbeddingMethod m) {
  switch (m) {
    case EmbeddingMethod::node2vec: return "node2vec";
    case EmbeddingMethod::poincare: return "poincare";
    case EmbeddingMethod::role2vec: return "role2vec";
    case EmbeddingMethod::mnmf: return "mnmf";
  }
  return "unknown";
}

inline EmbeddingMethod parse_embedding_method(const std::string& name) {
  for (auto m : {EmbeddingMethod::node2vec, EmbeddingMethod::poincare, EmbeddingMethod::role2vec, EmbeddingMethod::mnmf}) {
    if (name == to_string(m)) return m;
  }
  throw ConfigError("embeddings", "unknown embedding method '" + name + "'");
}

// One feature set: a single method or a concatenation written "a+b".
struct EmbeddingSpec {
  std::vector<EmbeddingMethod> parts;

  std::string name() const {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "+" : "") + std::string(to_string(parts[i]));
    return out;
  }

  static EmbeddingSpec parse(const std::string& text) {
    EmbeddingSpec spec;
    std::size_t start = 0;
    while (true) {
      const auto plus = text.find('+', start);
      spec.parts.push_back(parse_embedding_method(text.substr(start, plus - start)));
      if (plus == std::string::npos) break;
      start = plus + 1;
    }
    return spec;
  }

  bool operator==(const EmbeddingSpec&) const = default;
};

struct EmbeddingOptions {
  std::size_t dim = 64;
  std::size_t walk_length = 5;
  std::size_t walks_per_node = 10;
  double p = 1.0;
  double q = 1.0;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t skipgram_epochs = 5;
  std::size_t poincare_epochs = 50;
  std::size_t poincare_negatives = 10;
  std::size_t mnmf_iterations = 200;
  std::size_t mnmf_communities = 8;
};

struct ModelOptions {
  std::size_t forest_trees = 100;
  std::size_t forest_max_depth = 16;
  std::size_t bagging_rounds = 100;
  std::size_t upu_epochs = 200;
  std::optional<double> upu_prior;
  double svm_c = 1.0;
  double elkanoto_holdout = 0.2;
  std::string elkanoto_base = "logreg";
  std::string bagging_base = "linear_svm";
};

// Either a synthetic generator, an edge list with labels, or a snapshot
// directory written by `ingest` / `synth`.
struct DatasetSource {
  std::optional<SyntheticSpec> synthetic;
  std::filesystem::path edges;
  std::filesystem::path labels;
  std::filesystem::path snapshot;
  bool directed = false;
  std::string id;
};

struct ExperimentConfig {
  DatasetSource dataset;
  std::vector<EmbeddingSpec> embeddings;
  std::vector<ModelKind> models;
  std::size_t repeats = 10;
  double train_fraction = 0.8;
  std::vector<std::size_t> hide_counts;
  double hide_fraction = 0.0;  // benchmark only: share of seed positives hidden
  double threshold = 0.5;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  EmbeddingOptions embedding;
  ModelOptions model;

  void validate() const {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train_fraction", "must lie in (0, 1)");
    if (repeats == 0) throw ConfigError("repeats", "must be >= 1");
    if (!(hide_fraction >= 0.0 && hide_fraction < 1.0)) throw ConfigError("hide_fraction", "must lie in [0, 1)");
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("threshold", "must lie in [0, 1]");
    if (embedding.dim == 0) throw ConfigError("embedding.dim", "must be >= 1");
    if (dataset.synthetic) dataset.synthetic->validate();
  }
};

namespace detail {

// Reads typed keys from one JSON object and rejects keys it never asked for.
class ObjectReader {
 public:
  ObjectReader(const nlohmann::json& object, std::string prefix) : object_(object), prefix_(std::move(prefix)) {
    if (!object_.is_object()) throw ConfigError(prefix_.empty() ? "<root>" : prefix_, "expected a JSON object");
  }

  std::string key_path(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

  bool has(const std::string& key) {
    seen_.insert(key);
    return object_.contains(key);
  }

  const nlohmann::json& raw(const std::string& key) {
    seen_.insert(key);
    return object_.at(key);
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    out = convert<T>(key, object_.at(key));
  }

  template <typename T>
  void read(const std::string& key, std::optional<T>& out) {
    if (!has(key) || object_.at(key).is_null()) return;
    out = convert<T>(key, object_.at(key));
  }

  template <typename T>
  T require(const std::string& key) {
    if (!has(key)) throw ConfigError(key_path(key), "required key is missing");
    return convert<T>(key, object_.at(key));
  }

  void finish() const {
    for (const auto& item : object_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(key_path(item.key()), "unknown key");
    }
  }

  template <typename T>
  T convert(const std::string& key, const nlohmann::json& value) const {
    if constexpr (std::is_same_v<T, bool>) {
      if (!value.is_boolean()) throw ConfigError(key_path(key), "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!value.is_number_integer() || (std::is_unsigned_v<T> && value.get<std::int64_t>() < 0 && !value.is_number_unsigned())) {
        throw ConfigError(key_path(key), "expected a nonnegative integer");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!value.is_number()) throw ConfigError(key_path(key), "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!value.is_string()) throw ConfigError(key_path(key), "expected a string");
    }
    try {
      return value.get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(key_path(key), "has the wrong type");
    }
  }

 private:
  const nlohmann::json& object_;
  std::string prefix_;
  std::set<std::string> seen_;
};

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  const std::filesystem::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace detail

inline SyntheticSpec parse_synthetic_spec(const nlohmann::json& j, const std::string& prefix) {
  detail::ObjectReader r(j, prefix);
  SyntheticSpec spec;
  r.read("n_nodes", spec.n_nodes);
  r.read("n_illicit", spec.n_illicit);
  r.read("n_blocks", spec.n_blocks);
  r.read("p_in", spec.p_in);
  r.read("p_out", spec.p_out);
  r.read("illicit_concentration", spec.illicit_concentration);
  r.read("p_illicit", spec.p_illicit);
  r.read("label_frequency", spec.label_frequency);
  r.finish();
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(r.key_path(e.key()), std::string(e.what()).substr(e.key().size() + 2));
  }
  return spec;
}

// `base_dir` resolves relative dataset paths (normally the config file's
// directory).
inline ExperimentConfig parse_experiment_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  detail::ObjectReader r(j, "");
  ExperimentConfig cfg;

  if (!r.has("dataset")) throw ConfigError("dataset", "required key is missing");
  {
    detail::ObjectReader d(r.raw("dataset"), "dataset");
    if (d.has("synthetic")) cfg.dataset.synthetic = parse_synthetic_spec(d.raw("synthetic"), "dataset.synthetic");
    std::string edges, labels, snapshot;
    d.read("edges", edges);
    d.read("labels", labels);
    d.read("snapshot", snapshot);
    d.read("directed", cfg.dataset.directed);
    d.read("id", cfg.dataset.id);
    d.finish();
    if (!edges.empty()) cfg.dataset.edges = detail::resolve(base_dir, edges);
    if (!labels.empty()) cfg.dataset.labels = detail::resolve(base_dir, labels);
    if (!snapshot.empty()) cfg.dataset.snapshot = detail::resolve(base_dir, snapshot);
    const int sources = int(cfg.dataset.synthetic.has_value()) + int(!edges.empty()) + int(!snapshot.empty());
    if (sources != 1) throw ConfigError("dataset", "give exactly one of 'synthetic', 'edges' or 'snapshot'");
    if (!edges.empty() && labels.empty()) throw ConfigError("dataset.labels", "required with 'edges'");
  }

  if (r.has("embeddings")) {
    const auto& list = r.raw("embeddings");
    if (!list.is_array()) throw ConfigError("embeddings", "expected an array of method names");
    for (const auto& item : list) {
      if (!item.is_string()) throw ConfigError("embeddings", "expected an array of method names");
      cfg.embeddings.push_back(EmbeddingSpec::parse(item.get<std::string>()));
    }
  }
  if (r.has("models")) {
    const auto& list = r.raw("models");
    if (!list.is_array()) throw ConfigError("models", "expected an array of model names");
    for (const auto& item : list) {
      if (!item.is_string()) throw ConfigError("models", "expected an array of model names");
      try {
        cfg.models.push_back(parse_model_kind(item.get<std::string>()));
      } catch (const ConfigError&) {
        throw ConfigError("models", "unknown model '" + item.get<std::string>() + "'");
      }
    }
  }
  r.read("repeats", cfg.repeats);
  r.read("train_fraction", cfg.train_fraction);
  if (r.has("hide_counts")) {
    const auto& list = r.raw("hide_counts");
    if (!list.is_array()) throw ConfigError("hide_counts", "expected an array of nonnegative integers");
    for (const auto& item : list) {
      if (!item.is_number_unsigned()) throw ConfigError("hide_counts", "expected an array of nonnegative integers");
      cfg.hide_counts.push_back(item.get<std::size_t>());
    }
  }
  r.read("hide_fraction", cfg.hide_fraction);
  r.read("threshold", cfg.threshold);
  r.read("seed", cfg.seed);
  r.read("jobs", cfg.jobs);

  if (r.has("embedding")) {
    detail::ObjectReader e(r.raw("embedding"), "embedding");
    auto& o = cfg.embedding;
    e.read("dim", o.dim);
    e.read("walk_length", o.walk_length);
    e.read("walks_per_node", o.walks_per_node);
    e.read("p", o.p);
    e.read("q", o.q);
    e.read("window", o.window);
    e.read("negatives", o.negatives);
    e.read("skipgram_epochs", o.skipgram_epochs);
    e.read("poincare_epochs", o.poincare_epochs);
    e.read("poincare_negatives", o.poincare_negatives);
    e.read("mnmf_iterations", o.mnmf_iterations);
    e.read("mnmf_communities", o.mnmf_communities);
    e.finish();
  }
  if (r.has("model")) {
    detail::ObjectReader m(r.raw("model"), "model");
    auto& o = cfg.model;
    m.read("forest_trees", o.forest_trees);
    m.read("forest_max_depth", o.forest_max_depth);
    m.read("bagging_rounds", o.bagging_rounds);
    m.read("upu_epochs", o.upu_epochs);
    m.read("upu_prior", o.upu_prior);
    m.read("svm_c", o.svm_c);
    m.read("elkanoto_holdout", o.elkanoto_holdout);
    m.read("elkanoto_base", o.elkanoto_base);
    m.read("bagging_base", o.bagging_base);
    m.finish();
  }
  r.finish();
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  return parse_experiment_config(j, path.parent_path());
}

}  // namespace pugraph
