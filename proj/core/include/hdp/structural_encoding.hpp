#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hdp/graph.hpp"

namespace hdp {

// Landing probabilities of hop-limited random walks onto labelled targets.
struct StructuralEncoding {
  Matrix values;                     // N x |targets|
  std::vector<NodeId> target_order;  // column order
  int hops = 0;
};

// Deterministic target list drawn from the training nodes, ascending by id.
// Without a cap every training node is a target. With a cap below the
// training size, classes are visited round-robin in ascending label order,
// each contributing its lowest unused node id, so per-class counts differ by
// at most one. Throws ConfigError for an empty training set or a cap <= 0.
std::vector<NodeId> build_target_set(std::span<const NodeId> train, std::span<const int> labels,
                                     std::optional<long> max_targets);

// Row i is one-hot at the rank of i in targets, zero for non-targets.
SparseMatrix init_onehot(std::span<const NodeId> targets, NodeId num_nodes);

// walk^hops * onehot, evaluated as `hops` sparse-dense products.
StructuralEncoding encode(const SparseRowStochastic& walk, const SparseMatrix& onehot,
                          std::span<const NodeId> targets, int hops);

}  // namespace hdp
