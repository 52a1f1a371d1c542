#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hdp/graph.hpp"

namespace hdp {

// One-dimensional numeric array from a .npy member, widened to int64.
struct NpyArray {
  std::string dtype;
  std::vector<std::int64_t> shape;
  std::vector<std::int64_t> values;
};

// Reads every member of an .npz archive (stored or deflated) keyed by member
// name without the ".npy" suffix. Supports bool, uint8 and little-endian
// int32/int64 payloads.
std::map<std::string, NpyArray> read_npz(const std::filesystem::path& path);

struct RawDataset {
  Graph graph;
  std::vector<SplitMasks> splits;
};

// Imports the Geom-GCN text distribution:
//   out1_graph_edges.txt          header line, then u<TAB>v
//   out1_node_feature_label.txt   header line, then id<TAB>f1,f2,...<TAB>label
//   *_split_0.6_0.2_<i>.npz       train_mask/val_mask/test_mask (optional;
//                                 searched in raw_dir and raw_dir/splits)
// For film/actor the feature column lists nonzero indices instead of values.
RawDataset import_geom_gcn(const std::filesystem::path& raw_dir, const std::string& name);

}  // namespace hdp
