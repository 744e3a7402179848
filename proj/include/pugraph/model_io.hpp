#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "pugraph/forest.hpp"
#include "pugraph/linear.hpp"
#include "pugraph/model.hpp"
#include "pugraph/pu_learn.hpp"

namespace pugraph {

// Text parameter dump:
//   pugraph-model 1
//   kind <logreg|linear_svm|random_forest|bagging_pu|elkanoto|upu>
//   <kind-specific fields; nested models repeat from "kind">
inline constexpr int kModelFormatVersion = 1;

inline void save_model(const ScoredModel& model, std::ostream& out) {
  const auto old_precision = out.precision(17);
  out << "pugraph-model " << kModelFormatVersion << '\n';
  model.write(out);
  out.precision(old_precision);
}

namespace detail {

inline ModelPtr read_model_body(std::istream& in) {
  const auto kind = parse_model_kind(read_value<std::string>(in, "kind"));
  switch (kind) {
    case ModelKind::logreg:
    case ModelKind::linear_svm:
      return std::make_shared<LinearModel>(LinearModel::read_body(in, kind));
    case ModelKind::random_forest:
      return RandomForest::read_body(in);
    case ModelKind::elkanoto: {
      const auto c_hat = read_value<double>(in, "c_hat");
      return std::make_shared<ElkanotoModel>(read_model_body(in), c_hat);
    }
    case ModelKind::bagging_pu: {
      const auto k = read_value<std::size_t>(in, "sample_size");
      const auto count = read_value<std::size_t>(in, "members");
      std::vector<ModelPtr> members;
      for (std::size_t i = 0; i < count; ++i) members.push_back(read_model_body(in));
      return std::make_shared<BaggingPuModel>(std::move(members), std::vector<std::size_t>{}, std::vector<double>{}, k);
    }
    case ModelKind::upu: {
      const auto prior = read_value<double>(in, "prior");
      return std::make_shared<UpuModel>(LinearModel::read_body(in, ModelKind::upu), prior, std::vector<double>{});
    }
  }
  throw IoError("model file: unhandled kind");
}

}  // namespace detail

inline ModelPtr load_model(std::istream& in) {
  const auto version = detail::read_value<int>(in, "pugraph-model");
  if (version != kModelFormatVersion) throw IoError("unsupported model format version " + std::to_string(version));
  return detail::read_model_body(in);
}

inline void save_model(const ScoredModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  save_model(model, out);
}

inline ModelPtr load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return load_model(in);
}

}  // namespace pugraph
