#pragma once

#include <cstdint>
#include <vector>

#include "hdp/graph.hpp"

namespace hdp {

struct SyntheticSpec {
  NodeId num_nodes = 200;
  int num_classes = 4;
  Eigen::Index num_features = 32;
  double average_degree = 4.0;
  double homophily = 0.2;        // probability that an edge joins equal labels
  double feature_signal = 1.0;   // class-mean separation relative to unit noise
  double feature_density = 1.0;  // fraction of feature entries kept nonzero
  std::uint64_t seed = 0;
};

// Planted-partition graph with Gaussian class-conditional features.
Graph make_synthetic_graph(const SyntheticSpec& spec);

// Seeded random 48/32/20 split.
SplitMasks random_split(NodeId num_nodes, int split_id, std::uint64_t seed);

}  // namespace hdp
