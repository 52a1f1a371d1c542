#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hdp/graph.hpp"

namespace hdp {

inline constexpr int kNumPublishedSplits = 10;

// Reads <root>/<name>/{edges.tsv,features.csv,labels.txt}. Directed input
// edges are symmetrized, duplicates collapse and self-loops are dropped.
Graph load_dataset(const std::filesystem::path& root, const std::string& name);

// Reads <root>/<name>/splits/<split_id>.json.
SplitMasks load_splits(const std::filesystem::path& root, const std::string& name, int split_id);

// Writes the dataset layout read by load_dataset/load_splits. Output is a
// pure function of the inputs, so re-running yields identical bytes.
void write_dataset(const std::filesystem::path& dir, const Graph& graph,
                   const std::vector<SplitMasks>& splits);

// Entry (u, v) = 1/deg(u) over the neighbour set of u, optionally with a self-loop.
SparseRowStochastic row_normalize(const Graph& graph, bool add_self_loops);

// order 1: the graph's edges. order 2: pairs joined by a length-2 walk, unioned
// with the 1-hop edges; the diagonal is excluded.
EdgeSet khop_edge_set(const Graph& graph, int order);

// "N=183 E=280 F=1703 K=5"
std::string stats_line(const Graph& graph);

// Dataset root from HDP_DATA_DIR, falling back to the given default.
std::filesystem::path data_root(const std::filesystem::path& fallback);

}  // namespace hdp
