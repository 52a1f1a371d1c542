#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdp/graph.hpp"

namespace hdp {

struct TrainHomophily {
  double h_prime = 0.5;
  std::size_t train_edges = 0;  // edges with both endpoints in the training set
  bool fallback = false;        // true when no such edge exists (h_prime = 0.5)
};

struct HomophilyEstimate {
  double h_prime = 0.0;
  double lambda = 1.0;
  double h_hat = 0.0;
};

// Homophilous/heterophilous split of an edge set. Each undirected pair is
// decided once; self-loops are implied on the homophilous side.
struct Partition {
  std::vector<Edge> hm_edges;
  std::vector<Edge> ht_edges;
  std::vector<char> is_hm;  // aligned with the source edge set
  double epsilon = 0.0;
  double h_hat = 0.0;
  int epoch_created = -1;  // -1: built from the initial assignments
};

// Aggregation operators built from a partition.
struct PartitionOperators {
  SparseMatrix hm;  // mean over homophilous neighbours plus self
  SparseMatrix ht;  // mean over heterophilous neighbours; empty rows stay zero

  static PartitionOperators build(const Partition& partition, NodeId num_nodes);
};

struct PartitionQuality {
  double h_input = 0.0;
  double h_hm = 0.0;
  double h_ht = 0.0;
  double partition_accuracy = 0.0;
  double epsilon = 0.0;
  double h_hat = 0.0;
  std::size_t hm_count = 0;
  std::size_t ht_count = 0;

  nlohmann::json to_json() const;
};

// Fraction of training-internal edges (both endpoints in train) joining equal labels.
TrainHomophily estimate_homophily(const EdgeSet& edges, std::span<const int> labels,
                                  std::span<const NodeId> train, NodeId num_nodes);

// clamp(lambda * h_prime, 0, 1); lambda must lie in [0.8, 1.2].
double rescale(double h_prime, double lambda);

// P_uv = <sharpen(z_u), sharpen(z_v)>, one value per edge. Sharpening raises a
// row elementwise to `exponent` and renormalizes it.
std::vector<double> edge_probabilities(const Matrix& assignments, const EdgeSet& edges,
                                       double exponent);

// Number of homophilous edges for a rescaled ratio: floor(h_hat * edge_count).
std::size_t homophilous_quota(double h_hat, std::size_t edge_count);

// The quota-th largest probability, or +infinity when the quota is zero.
double threshold(std::span<const double> probabilities, double h_hat);

// Edges sorted by descending probability, ties by ascending edge index; the
// first `quota` go to the homophilous side.
Partition split(std::span<const double> probabilities, double h_hat, const EdgeSet& edges,
                int epoch_created = -1);

PartitionQuality partition_quality(const Partition& partition, std::span<const int> labels);

}  // namespace hdp
