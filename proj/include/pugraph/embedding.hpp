#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "pugraph/error.hpp"
#include "pugraph/graph.hpp"
#include "pugraph/graph_io.hpp"
#include "pugraph/matrix.hpp"

namespace pugraph {

// n x dim node vectors. Row i belongs to node_ids[i].
struct EmbeddingMatrix {
  Matrix vectors;
  std::vector<std::string> node_ids;
  std::string method_tag;

  std::size_t dim() const { return static_cast<std::size_t>(vectors.cols()); }
  std::size_t size() const { return node_ids.size(); }

  bool all_finite() const { return vectors.allFinite(); }

  static EmbeddingMatrix for_graph(const TransactionGraph& graph, Matrix vectors, std::string tag) {
    EmbeddingMatrix e;
    e.vectors = std::move(vectors);
    e.node_ids.assign(graph.external_ids().begin(), graph.external_ids().end());
    e.method_tag = std::move(tag);
    return e;
  }
};

// Row-wise concatenation [a | b]. Rows follow a's node order; b is
// re-aligned by node id.
inline EmbeddingMatrix concat_embeddings(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  std::unordered_map<std::string, Eigen::Index> b_rows;
  for (std::size_t i = 0; i < b.node_ids.size(); ++i) b_rows.emplace(b.node_ids[i], static_cast<Eigen::Index>(i));

  std::set<std::string> only_a, only_b(b.node_ids.begin(), b.node_ids.end());
  for (const auto& id : a.node_ids) {
    if (!b_rows.count(id)) only_a.insert(id);
    only_b.erase(id);
  }
  if (!only_a.empty() || !only_b.empty()) {
    std::string listing;
    auto append = [&](const std::set<std::string>& ids, const char* side) {
      for (const auto& id : ids) listing += (listing.empty() ? "" : " ") + std::string(side) + id;
    };
    append(only_a, "+");
    append(only_b, "-");
    throw DimensionError("embedding node sets differ: " + listing);
  }

  EmbeddingMatrix out;
  out.node_ids = a.node_ids;
  out.method_tag = a.method_tag + "+" + b.method_tag;
  out.vectors.resize(a.vectors.rows(), a.vectors.cols() + b.vectors.cols());
  for (Eigen::Index i = 0; i < a.vectors.rows(); ++i) {
    out.vectors.row(i).head(a.vectors.cols()) = a.vectors.row(i);
    out.vectors.row(i).tail(b.vectors.cols()) = b.vectors.row(b_rows.at(a.node_ids[static_cast<std::size_t>(i)]));
  }
  return out;
}

inline std::filesystem::path embedding_metadata_path(const std::filesystem::path& csv) {
  auto meta = csv;
  meta += ".meta.json";
  return meta;
}

// CSV with header node_id,e0..e{d-1}; method tag goes to <path>.meta.json.
inline void write_embedding_csv(const std::filesystem::path& path, const EmbeddingMatrix& emb) {
  {
    auto out = detail::open_output(path);
    out << "node_id";
    for (std::size_t j = 0; j < emb.dim(); ++j) out << ",e" << j;
    out << '\n';
    for (std::size_t i = 0; i < emb.size(); ++i) {
      out << emb.node_ids[i];
      for (std::size_t j = 0; j < emb.dim(); ++j) out << ',' << emb.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      out << '\n';
    }
  }
  nlohmann::json meta = {{"method_tag", emb.method_tag}, {"dim", emb.dim()}, {"node_count", emb.size()}};
  auto out = detail::open_output(embedding_metadata_path(path));
  out << meta.dump(2) << '\n';
}

inline EmbeddingMatrix read_embedding_csv(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  std::vector<double> values;
  EmbeddingMatrix emb;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    const auto fields = detail::split_fields(body, ',');
    if (line_no == 1) {
      if (fields.empty() || fields[0] != "node_id") throw ParseError(line_no, "expected node_id header");
      dim = fields.size() - 1;
      continue;
    }
    if (fields.size() != dim + 1) throw ParseError(line_no, "expected " + std::to_string(dim + 1) + " fields");
    emb.node_ids.emplace_back(fields[0]);
    for (std::size_t j = 1; j <= dim; ++j) {
      double v = 0.0;
      if (!detail::parse_double(fields[j], v)) throw ParseError(line_no, "non-numeric embedding value");
      values.push_back(v);
    }
  }
  emb.vectors = Eigen::Map<Matrix>(values.data(), static_cast<Eigen::Index>(emb.node_ids.size()), static_cast<Eigen::Index>(dim));
  const auto meta_path = embedding_metadata_path(path);
  if (std::filesystem::exists(meta_path)) {
    auto meta_in = detail::open_input(meta_path);
    emb.method_tag = nlohmann::json::parse(meta_in).value("method_tag", "");
  }
  return emb;
}

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

}  // namespace pugraph
