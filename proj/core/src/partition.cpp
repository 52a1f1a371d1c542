#include "hdp/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hdp/errors.hpp"

namespace hdp {

PartitionOperators PartitionOperators::build(const Partition& partition, NodeId num_nodes) {
  PartitionOperators ops;
  ops.hm = SparseRowStochastic::mean_operator(num_nodes, partition.hm_edges, true).matrix();
  ops.ht = SparseRowStochastic::mean_operator(num_nodes, partition.ht_edges, false).matrix();
  return ops;
}

nlohmann::json PartitionQuality::to_json() const {
  return {{"h_input", h_input},
          {"h_hm", h_hm},
          {"h_ht", h_ht},
          {"partition_accuracy", partition_accuracy},
          {"epsilon", std::isfinite(epsilon) ? nlohmann::json(epsilon) : nlohmann::json("inf")},
          {"h_hat", h_hat},
          {"hm_edges", hm_count},
          {"ht_edges", ht_count}};
}

TrainHomophily estimate_homophily(const EdgeSet& edges, std::span<const int> labels,
                                  std::span<const NodeId> train, NodeId num_nodes) {
  std::vector<char> in_train(static_cast<std::size_t>(num_nodes), 0);
  for (NodeId v : train) in_train[static_cast<std::size_t>(v)] = 1;
  std::size_t internal = 0;
  std::size_t same = 0;
  for (const Edge& e : edges.edges) {
    if (!in_train[static_cast<std::size_t>(e.u)] || !in_train[static_cast<std::size_t>(e.v)]) continue;
    ++internal;
    if (labels[static_cast<std::size_t>(e.u)] == labels[static_cast<std::size_t>(e.v)]) ++same;
  }
  TrainHomophily out;
  out.train_edges = internal;
  if (internal == 0) {
    out.fallback = true;
    out.h_prime = 0.5;
  } else {
    out.h_prime = static_cast<double>(same) / static_cast<double>(internal);
  }
  return out;
}

double rescale(double h_prime, double lambda) {
  if (!(lambda >= 0.8 - 1e-12 && lambda <= 1.2 + 1e-12)) {
    throw ConfigError("lambda " + std::to_string(lambda) + " outside [0.8, 1.2]");
  }
  return std::clamp(lambda * h_prime, 0.0, 1.0);
}

std::vector<double> edge_probabilities(const Matrix& assignments, const EdgeSet& edges,
                                       double exponent) {
  if (exponent <= 0.0) throw ConfigError("sharpen exponent must be positive");
  Matrix sharp = assignments.array().pow(exponent).matrix();
  for (Eigen::Index r = 0; r < sharp.rows(); ++r) {
    const double s = sharp.row(r).sum();
    if (s > 0.0) sharp.row(r) /= s;
  }
  std::vector<double> p;
  p.reserve(edges.size());
  for (const Edge& e : edges.edges) p.push_back(sharp.row(e.u).dot(sharp.row(e.v)));
  return p;
}

std::size_t homophilous_quota(double h_hat, std::size_t edge_count) {
  const double raw = std::floor(h_hat * static_cast<double>(edge_count) + 1e-9);
  return std::min(edge_count, static_cast<std::size_t>(std::max(raw, 0.0)));
}

namespace {

std::vector<std::size_t> descending_order(std::span<const double> p) {
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
  return order;
}

}  // namespace

double threshold(std::span<const double> probabilities, double h_hat) {
  const std::size_t quota = homophilous_quota(h_hat, probabilities.size());
  if (quota == 0) return std::numeric_limits<double>::infinity();
  std::vector<double> sorted(probabilities.begin(), probabilities.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(quota - 1), sorted.end(),
                   std::greater<>());
  return sorted[quota - 1];
}

Partition split(std::span<const double> probabilities, double h_hat, const EdgeSet& edges,
                int epoch_created) {
  if (probabilities.size() != edges.size()) {
    throw DimensionError("edge probabilities do not match the edge set");
  }
  Partition part;
  part.h_hat = h_hat;
  part.epoch_created = epoch_created;
  part.is_hm.assign(edges.size(), 0);
  const std::size_t quota = homophilous_quota(h_hat, edges.size());
  const auto order = descending_order(probabilities);
  for (std::size_t k = 0; k < quota; ++k) part.is_hm[order[k]] = 1;
  part.epsilon = quota == 0 ? std::numeric_limits<double>::infinity() : probabilities[order[quota - 1]];
  for (std::size_t i = 0; i < edges.size(); ++i) {
    (part.is_hm[i] ? part.hm_edges : part.ht_edges).push_back(edges.edges[i]);
  }
  return part;
}

PartitionQuality partition_quality(const Partition& partition, std::span<const int> labels) {
  auto same_label = [&](const Edge& e) {
    return labels[static_cast<std::size_t>(e.u)] == labels[static_cast<std::size_t>(e.v)];
  };
  PartitionQuality q;
  q.epsilon = partition.epsilon;
  q.h_hat = partition.h_hat;
  q.hm_count = partition.hm_edges.size();
  q.ht_count = partition.ht_edges.size();
  const auto same_hm = static_cast<std::size_t>(
      std::count_if(partition.hm_edges.begin(), partition.hm_edges.end(), same_label));
  const auto same_ht = static_cast<std::size_t>(
      std::count_if(partition.ht_edges.begin(), partition.ht_edges.end(), same_label));
  if (q.hm_count > 0) q.h_hm = static_cast<double>(same_hm) / static_cast<double>(q.hm_count);
  if (q.ht_count > 0) q.h_ht = static_cast<double>(same_ht) / static_cast<double>(q.ht_count);
  const std::size_t total = q.hm_count + q.ht_count;
  if (total > 0) {
    q.h_input = static_cast<double>(same_hm + same_ht) / static_cast<double>(total);
    q.partition_accuracy =
        static_cast<double>(same_hm + (q.ht_count - same_ht)) / static_cast<double>(total);
  }
  return q;
}

}  // namespace hdp
