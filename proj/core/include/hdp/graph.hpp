#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include "hdp/linalg.hpp"

namespace hdp {

// Undirected edge in canonical form (u < v).
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  static Edge canonical(NodeId a, NodeId b) { return a < b ? Edge{a, b} : Edge{b, a}; }
  auto operator<=>(const Edge&) const = default;
};

struct Graph {
  std::string name;
  NodeId num_nodes = 0;
  std::vector<Edge> edges;  // sorted, unique, no self-loops
  Matrix features;          // N x F
  std::vector<int> labels;  // N entries in [0, num_classes)
  int num_classes = 0;
  std::size_t raw_edge_count = 0;  // directed input lines before symmetrization

  Eigen::Index num_features() const { return features.cols(); }

  // Throws DataError when any structural invariant is violated.
  void validate() const;
};

struct SplitMasks {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;
  int split_id = 0;

  // Disjoint and covering [0, num_nodes).
  void validate(NodeId num_nodes) const;
};

// Hop order of origin: 1 for the graph's own edges, 2 for the two-hop closure.
struct EdgeSet {
  std::vector<Edge> edges;
  int order = 1;

  std::size_t size() const { return edges.size(); }
};

// Row-stochastic sparse operator; rows may be empty for isolated nodes.
class SparseRowStochastic {
 public:
  SparseRowStochastic() = default;
  explicit SparseRowStochastic(SparseMatrix m);

  const SparseMatrix& matrix() const { return matrix_; }
  Eigen::Index rows() const { return matrix_.rows(); }

  // Mean aggregation over an undirected edge list. Each edge contributes in
  // both directions; self-loops are appended per node when requested.
  static SparseRowStochastic mean_operator(NodeId num_nodes, const std::vector<Edge>& edges,
                                           bool self_loops);

 private:
  SparseMatrix matrix_;
};

// Adjacency lists, sorted by neighbour id.
std::vector<std::vector<NodeId>> adjacency_lists(NodeId num_nodes, const std::vector<Edge>& edges);

// Edge homophily ratio over the given edges. Returns 0 for an empty list.
double edge_homophily(const std::vector<Edge>& edges, const std::vector<int>& labels);

}  // namespace hdp
