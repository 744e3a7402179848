#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pugraph/error.hpp"
#include "pugraph/matrix.hpp"

namespace pugraph {

enum class ModelKind { logreg, linear_svm, random_forest, bagging_pu, elkanoto, upu };

inline const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::logreg: return "logreg";
    case ModelKind::linear_svm: return "linear_svm";
    case ModelKind::random_forest: return "random_forest";
    case ModelKind::bagging_pu: return "bagging_pu";
    case ModelKind::elkanoto: return "elkanoto";
    case ModelKind::upu: return "upu";
  }
  return "unknown";
}

inline ModelKind parse_model_kind(const std::string& name) {
  for (ModelKind k : {ModelKind::logreg, ModelKind::linear_svm, ModelKind::random_forest, ModelKind::bagging_pu,
                      ModelKind::elkanoto, ModelKind::upu}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("model", "unknown model kind '" + name + "'");
}

// A fitted classifier whose score is a positive-class probability in [0, 1].
class ScoredModel {
 public:
  virtual ~ScoredModel() = default;

  virtual ModelKind kind() const = 0;
  virtual std::size_t dim() const = 0;
  virtual double score(std::span<const double> x) const = 0;
  // Parameter dump in the versioned text format read by load_model().
  virtual void write(std::ostream& out) const = 0;
};

using ModelPtr = std::shared_ptr<const ScoredModel>;

// Fits a model to rows of `features` against binary `labels`.
using Trainer = std::function<ModelPtr(const Matrix& features, std::span<const std::uint8_t> labels, std::uint64_t seed)>;

struct Prediction {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
};

inline std::vector<double> score_rows(const ScoredModel& model, const Matrix& features) {
  if (features.rows() > 0 && static_cast<std::size_t>(features.cols()) != model.dim()) {
    throw DimensionError("model expects " + std::to_string(model.dim()) + " features, got " +
                         std::to_string(features.cols()));
  }
  std::vector<double> scores(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index i = 0; i < features.rows(); ++i) scores[static_cast<std::size_t>(i)] = model.score(row_span(features, i));
  return scores;
}

inline std::vector<std::uint8_t> apply_threshold(std::span<const double> scores, double threshold) {
  std::vector<std::uint8_t> labels(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) labels[i] = scores[i] >= threshold ? 1 : 0;
  return labels;
}

inline Prediction predict(const ScoredModel& model, const Matrix& features, double threshold = 0.5) {
  Prediction p;
  p.scores = score_rows(model, features);
  p.labels = apply_threshold(p.scores, threshold);
  return p;
}

inline void require_both_classes(std::span<const std::uint8_t> labels) {
  std::size_t pos = 0;
  for (auto l : labels) pos += l != 0;
  if (pos == 0 || pos == labels.size()) {
    throw DegenerateDataError("training data needs at least one example of each class (" + std::to_string(pos) +
                              " positive of " + std::to_string(labels.size()) + ")");
  }
}

inline void require_rows_match(const Matrix& features, std::span<const std::uint8_t> labels) {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw DimensionError("feature rows and labels differ in length");
  }
}

namespace detail {

inline void expect_token(std::istream& in, const std::string& token) {
  std::string got;
  if (!(in >> got) || got != token) throw IoError("model file: expected '" + token + "', found '" + got + "'");
}

template <typename T>
T read_value(std::istream& in, const std::string& name) {
  expect_token(in, name);
  T value{};
  if (!(in >> value)) throw IoError("model file: bad value for '" + name + "'");
  return value;
}

inline void write_vector(std::ostream& out, const std::string& name, const Vector& v) {
  out << name << ' ' << v.size();
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << v(i);
  out << '\n';
}

inline Vector read_vector(std::istream& in, const std::string& name) {
  const auto n = read_value<Eigen::Index>(in, name);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(in >> v(i))) throw IoError("model file: truncated vector '" + name + "'");
  }
  return v;
}

}  // namespace detail

}  // namespace pugraph
