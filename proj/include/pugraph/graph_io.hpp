#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "pugraph/error.hpp"
#include "pugraph/graph.hpp"

namespace pugraph {

enum class EdgeFormat { csv, tsv };

inline EdgeFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".tsv" || ext == ".tab") ? EdgeFormat::tsv : EdgeFormat::csv;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

inline bool is_header_name(std::string_view field) {
  std::string lower(field);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  static const std::set<std::string> names = {"src", "source", "from", "dst", "target", "to",
                                              "u", "v", "node_id", "id", "weight"};
  return names.count(lower) > 0;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  return out;
}

}  // namespace detail

// Parses src,dst[,weight] rows. A first row whose id columns are
// recognised column names, or whose weight column is not numeric, is
// treated as a header. Blank lines are skipped.
inline TransactionGraph parse_edge_list(std::istream& in, EdgeFormat format, bool directed) {
  const char sep = format == EdgeFormat::tsv ? '\t' : ',';
  GraphBuilder builder(directed);
  std::string line;
  std::size_t line_no = 0;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    const auto fields = detail::split_fields(body, sep);
    const bool was_first = first_row;
    first_row = false;
    if (was_first && fields.size() >= 2 &&
        ((detail::is_header_name(fields[0]) && detail::is_header_name(fields[1])) ||
         (fields.size() >= 3 && detail::is_header_name(fields[2])))) {
      continue;
    }
    if (fields.size() < 2 || fields.size() > 3) {
      throw ParseError(line_no, "expected src,dst[,weight] but found " + std::to_string(fields.size()) + " field(s)");
    }
    if (fields[0].empty() || fields[1].empty()) throw ParseError(line_no, "empty node id");
    double weight = 1.0;
    if (fields.size() == 3 && !detail::parse_double(fields[2], weight)) {
      throw ParseError(line_no, "weight '" + std::string(fields[2]) + "' is not a number");
    }
    if (!(weight >= 0.0) || !std::isfinite(weight)) throw ParseError(line_no, "weight must be finite and nonnegative");
    builder.add_edge(fields[0], fields[1], weight);
  }
  return builder.build();
}

inline TransactionGraph load_edge_list(const std::filesystem::path& path, EdgeFormat format, bool directed = false) {
  auto in = detail::open_input(path);
  return parse_edge_list(in, format, directed);
}

struct LabelLoadResult {
  LabelStore labels;
  std::vector<std::string> warnings;
};

// One external id per line; any further columns are ignored. Unknown ids
// are reported in `warnings`, repeated ids count once.
inline LabelLoadResult parse_labels(std::istream& in, const TransactionGraph& graph) {
  LabelLoadResult result{LabelStore::unlabeled(graph.node_count()), {}};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    const char sep = body.find('\t') != std::string_view::npos ? '\t' : ',';
    const auto id = detail::split_fields(body, sep).front();
    if (id.empty()) continue;
    if (auto node = graph.find(id)) {
      result.labels.s[*node] = 1;
    } else {
      result.warnings.push_back("line " + std::to_string(line_no) + ": unknown node id '" + std::string(id) + "'");
    }
  }
  return result;
}

inline LabelLoadResult load_labels(const std::filesystem::path& path, const TransactionGraph& graph) {
  auto in = detail::open_input(path);
  return parse_labels(in, graph);
}

inline void write_edge_list(std::ostream& out, const TransactionGraph& graph) {
  out << "src,dst,weight\n";
  for (const Edge& e : graph.edges()) {
    out << graph.external_id(e.src) << ',' << graph.external_id(e.dst) << ',' << e.weight << '\n';
  }
}

// Writes the labeled ids, one per line, in dense-id order.
inline void write_labels(std::ostream& out, const TransactionGraph& graph, const LabelStore& labels) {
  for (std::size_t v = 0; v < labels.s.size(); ++v) {
    if (labels.s[v]) out << graph.external_id(static_cast<NodeId>(v)) << '\n';
  }
}

// Snapshot = nodes.csv (dense id order, labels) + edges.csv. Unlike a bare
// edge list it keeps isolated nodes and the dense id assignment.
inline void write_snapshot(const std::filesystem::path& dir, const TransactionGraph& graph, const LabelStore& labels) {
  std::filesystem::create_directories(dir);
  {
    auto out = detail::open_output(dir / "nodes.csv");
    out << "node_id,s" << (labels.y ? ",y" : "") << '\n';
    for (std::size_t v = 0; v < graph.node_count(); ++v) {
      out << graph.external_id(static_cast<NodeId>(v)) << ',' << int(labels.s[v]);
      if (labels.y) out << ',' << int((*labels.y)[v]);
      out << '\n';
    }
  }
  auto out = detail::open_output(dir / "edges.csv");
  out << (graph.directed() ? "# directed\n" : "");
  write_edge_list(out, graph);
}

struct Snapshot {
  TransactionGraph graph;
  LabelStore labels;
};

inline Snapshot read_snapshot(const std::filesystem::path& dir) {
  auto nodes_in = detail::open_input(dir / "nodes.csv");
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> ids;
  LabelStore labels;
  bool has_y = false;
  while (std::getline(nodes_in, line)) {
    ++line_no;
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    const auto fields = detail::split_fields(body, ',');
    if (line_no == 1) {
      has_y = fields.size() == 3;
      if (has_y) labels.y.emplace();
      continue;
    }
    if (fields.size() != (has_y ? 3u : 2u)) throw ParseError(line_no, "malformed nodes.csv row");
    ids.emplace_back(fields[0]);
    labels.s.push_back(fields[1] == "1" ? 1 : 0);
    if (has_y) labels.y->push_back(fields[2] == "1" ? 1 : 0);
  }

  auto edges_in = detail::open_input(dir / "edges.csv");
  std::string first;
  std::getline(edges_in, first);
  const bool directed = detail::trim(first) == "# directed";
  GraphBuilder builder(directed);
  for (const auto& id : ids) builder.add_node(id);
  if (directed) std::getline(edges_in, first);
  line_no = 1;
  while (std::getline(edges_in, line)) {
    ++line_no;
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    const auto fields = detail::split_fields(body, ',');
    double w = 0.0;
    if (fields.size() != 3 || !detail::parse_double(fields[2], w)) throw ParseError(line_no, "malformed edges.csv row");
    builder.add_edge(fields[0], fields[1], w);
  }
  if (builder.node_count() != ids.size()) throw IoError("edges.csv references nodes missing from nodes.csv");
  return {builder.build(), std::move(labels)};
}

}  // namespace pugraph
