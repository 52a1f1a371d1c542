#include "hdp/graph_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string_view>

#include <nlohmann/json.hpp>

#include "hdp/errors.hpp"

namespace hdp {
namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Calls fn(line_number, line) for each non-empty line.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t end = text.find('\n');
    std::string_view line = text.substr(0, end);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (!line.empty()) fn(line_no, line);
    if (end == std::string_view::npos) break;
    text.remove_prefix(end + 1);
  }
}

template <typename T>
T parse_number(std::string_view token, const fs::path& file, std::size_t line_no) {
  while (!token.empty() && (token.front() == ' ' || token.front() == '\t')) token.remove_prefix(1);
  while (!token.empty() && (token.back() == ' ' || token.back() == '\t')) token.remove_suffix(1);
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw DataError(file.string() + ":" + std::to_string(line_no) + ": cannot parse '" +
                    std::string(token) + "'");
  }
  return value;
}

void append_double(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

Graph load_dataset(const fs::path& root, const std::string& name) {
  const fs::path dir = root / name;
  const fs::path edges_file = dir / "edges.tsv";
  const fs::path features_file = dir / "features.csv";
  const fs::path labels_file = dir / "labels.txt";
  for (const fs::path& p : {edges_file, features_file, labels_file}) {
    if (!fs::exists(p)) throw DataError("missing dataset file " + p.string());
  }

  Graph g;
  g.name = name;

  const std::string label_text = read_file(labels_file);
  int max_label = -1;
  for_each_line(label_text, [&](std::size_t line_no, std::string_view line) {
    const int y = parse_number<int>(line, labels_file, line_no);
    if (y < 0) {
      throw DataError(labels_file.string() + ":" + std::to_string(line_no) + ": label " +
                      std::to_string(y) + " is negative");
    }
    g.labels.push_back(y);
    max_label = std::max(max_label, y);
  });
  g.num_nodes = static_cast<NodeId>(g.labels.size());
  g.num_classes = max_label + 1;

  const std::string feature_text = read_file(features_file);
  std::vector<std::vector<double>> rows;
  rows.reserve(g.labels.size());
  for_each_line(feature_text, [&](std::size_t line_no, std::string_view line) {
    std::vector<double> row;
    if (!rows.empty()) row.reserve(rows.front().size());
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      row.push_back(parse_number<double>(line.substr(start, comma - start), features_file, line_no));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DataError(features_file.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(rows.front().size()) + " columns, found " +
                      std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  });
  if (rows.size() != g.labels.size()) {
    throw DataError("dimension mismatch: " + std::to_string(rows.size()) + " feature rows vs " +
                    std::to_string(g.labels.size()) + " labels");
  }
  const Eigen::Index num_features = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  g.features.resize(g.num_nodes, num_features);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Eigen::Index c = 0; c < num_features; ++c) {
      g.features(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    }
  }

  const std::string edge_text = read_file(edges_file);
  for_each_line(edge_text, [&](std::size_t line_no, std::string_view line) {
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw DataError(edges_file.string() + ":" + std::to_string(line_no) + ": expected u<TAB>v");
    }
    const auto u = parse_number<NodeId>(line.substr(0, tab), edges_file, line_no);
    const auto v = parse_number<NodeId>(line.substr(tab + 1), edges_file, line_no);
    if (u < 0 || v < 0 || u >= g.num_nodes || v >= g.num_nodes) {
      throw DataError(edges_file.string() + ":" + std::to_string(line_no) +
                      ": endpoint outside [0," + std::to_string(g.num_nodes) + ")");
    }
    ++g.raw_edge_count;
    if (u != v) g.edges.push_back(Edge::canonical(u, v));
  });
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());

  g.validate();
  return g;
}

SplitMasks load_splits(const fs::path& root, const std::string& name, int split_id) {
  if (split_id < 0 || split_id >= kNumPublishedSplits) {
    throw ConfigError("split id " + std::to_string(split_id) + " out of range [0," +
                      std::to_string(kNumPublishedSplits) + ")");
  }
  const fs::path file = root / name / "splits" / (std::to_string(split_id) + ".json");
  if (!fs::exists(file)) throw DataError("missing split file " + file.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(file));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(file.string() + ": " + e.what());
  }
  SplitMasks masks;
  masks.split_id = split_id;
  try {
    masks.train = doc.at("train").get<std::vector<NodeId>>();
    masks.val = doc.at("val").get<std::vector<NodeId>>();
    masks.test = doc.at("test").get<std::vector<NodeId>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(file.string() + ": " + e.what());
  }
  for (auto* part : {&masks.train, &masks.val, &masks.test}) std::sort(part->begin(), part->end());
  std::vector<NodeId> all;
  all.insert(all.end(), masks.train.begin(), masks.train.end());
  all.insert(all.end(), masks.val.begin(), masks.val.end());
  all.insert(all.end(), masks.test.begin(), masks.test.end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw DataError(file.string() + ": split masks overlap");
  }
  const fs::path labels_file = root / name / "labels.txt";
  if (fs::exists(labels_file)) {
    NodeId n = 0;
    for_each_line(read_file(labels_file), [&](std::size_t, std::string_view) { ++n; });
    masks.validate(n);
  }
  return masks;
}

void write_dataset(const fs::path& dir, const Graph& graph, const std::vector<SplitMasks>& splits) {
  fs::create_directories(dir / "splits");
  std::string text;
  for (const Edge& e : graph.edges) {
    text += std::to_string(e.u);
    text += '\t';
    text += std::to_string(e.v);
    text += '\n';
  }
  std::ofstream(dir / "edges.tsv", std::ios::binary) << text;

  text.clear();
  for (Eigen::Index r = 0; r < graph.features.rows(); ++r) {
    for (Eigen::Index c = 0; c < graph.features.cols(); ++c) {
      if (c) text += ',';
      append_double(text, graph.features(r, c));
    }
    text += '\n';
  }
  std::ofstream(dir / "features.csv", std::ios::binary) << text;

  text.clear();
  for (int y : graph.labels) {
    text += std::to_string(y);
    text += '\n';
  }
  std::ofstream(dir / "labels.txt", std::ios::binary) << text;

  for (const SplitMasks& s : splits) {
    nlohmann::json doc = {{"train", s.train}, {"val", s.val}, {"test", s.test}};
    std::ofstream(dir / "splits" / (std::to_string(s.split_id) + ".json"), std::ios::binary)
        << doc.dump() << '\n';
  }
}

SparseRowStochastic row_normalize(const Graph& graph, bool add_self_loops) {
  return SparseRowStochastic::mean_operator(graph.num_nodes, graph.edges, add_self_loops);
}

EdgeSet khop_edge_set(const Graph& graph, int order) {
  if (order != 1 && order != 2) throw ConfigError("order must be 1 or 2");
  EdgeSet out;
  out.order = order;
  out.edges = graph.edges;
  if (order == 2) {
    const auto adj = adjacency_lists(graph.num_nodes, graph.edges);
    for (const auto& nbrs : adj) {
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
          out.edges.push_back(Edge::canonical(nbrs[i], nbrs[j]));
        }
      }
    }
    std::sort(out.edges.begin(), out.edges.end());
    out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
  }
  return out;
}

std::string stats_line(const Graph& graph) {
  return "N=" + std::to_string(graph.num_nodes) + " E=" + std::to_string(graph.edges.size()) +
         " F=" + std::to_string(graph.num_features()) + " K=" + std::to_string(graph.num_classes);
}

fs::path data_root(const fs::path& fallback) {
  if (const char* env = std::getenv("HDP_DATA_DIR"); env && *env) return fs::path(env);
  return fallback;
}

}  // namespace hdp
