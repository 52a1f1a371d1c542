#include "hdp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hdp/errors.hpp"

namespace hdp {

SparseMatrix hstack(const SparseMatrix& left, const SparseMatrix& right) {
  if (left.rows() != right.rows()) {
    throw DimensionError("hstack: row mismatch " + std::to_string(left.rows()) + " vs " +
                         std::to_string(right.rows()));
  }
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(left.nonZeros() + right.nonZeros()));
  for (Eigen::Index r = 0; r < left.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(left, r); it; ++it) {
      triplets.emplace_back(r, it.col(), it.value());
    }
    for (SparseMatrix::InnerIterator it(right, r); it; ++it) {
      triplets.emplace_back(r, left.cols() + it.col(), it.value());
    }
  }
  SparseMatrix out(left.rows(), left.cols() + right.cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

std::vector<int> row_argmax(const Matrix& m) {
  std::vector<int> out(static_cast<std::size_t>(m.rows()), 0);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < m.cols(); ++c) {
      if (m(r, c) > m(r, best)) best = c;
    }
    out[static_cast<std::size_t>(r)] = static_cast<int>(best);
  }
  return out;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

void Graph::validate() const {
  if (num_nodes < 0) throw DataError("negative node count");
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v >= num_nodes || e.u >= e.v) {
      throw DataError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                      ") is not a canonical in-range pair");
    }
  }
  if (!std::is_sorted(edges.begin(), edges.end()) ||
      std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw DataError("edge list must be sorted and duplicate free");
  }
  if (features.rows() != num_nodes) {
    throw DataError("feature rows " + std::to_string(features.rows()) + " != N " +
                    std::to_string(num_nodes));
  }
  if (!features.allFinite()) throw DataError("feature matrix has non-finite entries");
  if (labels.size() != static_cast<std::size_t>(num_nodes)) {
    throw DataError("label count " + std::to_string(labels.size()) + " != N " +
                    std::to_string(num_nodes));
  }
  if (num_classes < 2) throw DataError("need at least two classes");
  std::vector<int> seen(static_cast<std::size_t>(num_classes), 0);
  for (int y : labels) {
    if (y < 0 || y >= num_classes) {
      throw DataError("label " + std::to_string(y) + " outside [0," +
                      std::to_string(num_classes) + ")");
    }
    seen[static_cast<std::size_t>(y)] = 1;
  }
  for (int k = 0; k < num_classes; ++k) {
    if (!seen[static_cast<std::size_t>(k)]) {
      throw DataError("class " + std::to_string(k) + " has no nodes");
    }
  }
}

void SplitMasks::validate(NodeId num_nodes) const {
  std::vector<int> owner(static_cast<std::size_t>(num_nodes), -1);
  const std::vector<NodeId>* parts[] = {&train, &val, &test};
  for (int p = 0; p < 3; ++p) {
    for (NodeId v : *parts[p]) {
      if (v < 0 || v >= num_nodes) {
        throw DataError("split node id " + std::to_string(v) + " out of range");
      }
      if (owner[static_cast<std::size_t>(v)] != -1) {
        throw DataError("split masks overlap at node " + std::to_string(v));
      }
      owner[static_cast<std::size_t>(v)] = p;
    }
  }
  for (NodeId v = 0; v < num_nodes; ++v) {
    if (owner[static_cast<std::size_t>(v)] == -1) {
      throw DataError("split masks do not cover node " + std::to_string(v));
    }
  }
}

SparseRowStochastic::SparseRowStochastic(SparseMatrix m) : matrix_(std::move(m)) {
  matrix_.makeCompressed();
  for (Eigen::Index r = 0; r < matrix_.outerSize(); ++r) {
    double sum = 0.0;
    bool any = false;
    for (SparseMatrix::InnerIterator it(matrix_, r); it; ++it) {
      if (it.value() < 0.0) throw ContractViolation("row-stochastic matrix has a negative entry");
      sum += it.value();
      any = true;
    }
    if (any && std::abs(sum - 1.0) > 1e-9) {
      throw ContractViolation("row " + std::to_string(r) + " sums to " + std::to_string(sum));
    }
  }
}

SparseRowStochastic SparseRowStochastic::mean_operator(NodeId num_nodes,
                                                       const std::vector<Edge>& edges,
                                                       bool self_loops) {
  std::vector<int> degree(static_cast<std::size_t>(num_nodes), self_loops ? 1 : 0);
  for (const Edge& e : edges) {
    ++degree[static_cast<std::size_t>(e.u)];
    ++degree[static_cast<std::size_t>(e.v)];
  }
  std::vector<Triplet> triplets;
  triplets.reserve(edges.size() * 2 + (self_loops ? static_cast<std::size_t>(num_nodes) : 0));
  for (const Edge& e : edges) {
    triplets.emplace_back(e.u, e.v, 1.0 / degree[static_cast<std::size_t>(e.u)]);
    triplets.emplace_back(e.v, e.u, 1.0 / degree[static_cast<std::size_t>(e.v)]);
  }
  if (self_loops) {
    for (NodeId v = 0; v < num_nodes; ++v) {
      triplets.emplace_back(v, v, 1.0 / degree[static_cast<std::size_t>(v)]);
    }
  }
  SparseMatrix m(num_nodes, num_nodes);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return SparseRowStochastic(std::move(m));
}

std::vector<std::vector<NodeId>> adjacency_lists(NodeId num_nodes,
                                                 const std::vector<Edge>& edges) {
  std::vector<std::vector<NodeId>> adj(static_cast<std::size_t>(num_nodes));
  for (const Edge& e : edges) {
    adj[static_cast<std::size_t>(e.u)].push_back(e.v);
    adj[static_cast<std::size_t>(e.v)].push_back(e.u);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

double edge_homophily(const std::vector<Edge>& edges, const std::vector<int>& labels) {
  if (edges.empty()) return 0.0;
  std::size_t same = 0;
  for (const Edge& e : edges) {
    if (labels[static_cast<std::size_t>(e.u)] == labels[static_cast<std::size_t>(e.v)]) ++same;
  }
  return static_cast<double>(same) / static_cast<double>(edges.size());
}

}  // namespace hdp
