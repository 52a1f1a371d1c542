#include "hdp/structural_encoding.hpp"

#include <algorithm>
#include <map>

#include "hdp/errors.hpp"

namespace hdp {

std::vector<NodeId> build_target_set(std::span<const NodeId> train, std::span<const int> labels,
                                     std::optional<long> max_targets) {
  if (train.empty()) throw ConfigError("structural encoding needs a non-empty training set");
  if (max_targets && *max_targets <= 0) throw ConfigError("max_targets must be positive");

  std::vector<NodeId> sorted(train.begin(), train.end());
  std::sort(sorted.begin(), sorted.end());
  if (!max_targets || static_cast<std::size_t>(*max_targets) >= sorted.size()) return sorted;

  std::map<int, std::vector<NodeId>> by_class;
  for (NodeId v : sorted) by_class[labels[static_cast<std::size_t>(v)]].push_back(v);
  std::map<int, std::size_t> cursor;
  std::vector<NodeId> out;
  const auto cap = static_cast<std::size_t>(*max_targets);
  while (out.size() < cap) {
    for (auto& [label, nodes] : by_class) {
      std::size_t& c = cursor[label];
      if (c < nodes.size() && out.size() < cap) out.push_back(nodes[c++]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

SparseMatrix init_onehot(std::span<const NodeId> targets, NodeId num_nodes) {
  std::vector<NodeId> sorted(targets.begin(), targets.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ConfigError("target list contains duplicates");
  }
  std::vector<Triplet> triplets;
  triplets.reserve(targets.size());
  for (std::size_t rank = 0; rank < targets.size(); ++rank) {
    const NodeId v = targets[rank];
    if (v < 0 || v >= num_nodes) throw DataError("target node out of range");
    triplets.emplace_back(v, static_cast<std::int64_t>(rank), 1.0);
  }
  SparseMatrix m(num_nodes, static_cast<Eigen::Index>(targets.size()));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

StructuralEncoding encode(const SparseRowStochastic& walk, const SparseMatrix& onehot,
                          std::span<const NodeId> targets, int hops) {
  if (hops < 0) throw ConfigError("hop count must be non-negative");
  if (walk.rows() != onehot.rows()) throw DimensionError("walk and one-hot row counts differ");
  StructuralEncoding enc;
  enc.hops = hops;
  enc.target_order.assign(targets.begin(), targets.end());
  enc.values = Matrix(onehot.toDense());
  for (int k = 0; k < hops; ++k) {
    Matrix next = walk.matrix() * enc.values;
    enc.values = std::move(next);
  }
  return enc;
}

}  // namespace hdp
