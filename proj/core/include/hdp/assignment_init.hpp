#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hdp/graph.hpp"

namespace hdp {

enum class FeaturePart { kEgo, kNeighbor, kStructural };

FeaturePart parse_feature_part(const std::string& name);
std::string to_string(FeaturePart part);

struct InitConfig {
  std::vector<FeaturePart> feature_parts{FeaturePart::kEgo, FeaturePart::kNeighbor};
  Eigen::Index hidden_dim = 512;
  double learning_rate = 0.01;
  double weight_decay = 5e-4;
  int epochs = 500;
  int patience = 100;
  double dropout = 0.0;
  std::uint64_t seed = 0;
};

struct SoftAssignment {
  Matrix assignments;            // N x K, rows sum to 1
  std::vector<int> hard_labels;  // row argmax, lowest index on ties
  int source_epoch = -1;         // -1: produced by the initialization stage
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
  double test_accuracy = 0.0;
  int epochs_run = 0;
};

// Node features as a sparse matrix, optionally with rows scaled to sum 1.
SparseMatrix sparse_features(const Graph& graph, bool normalize_rows);

// X^nb = A_hat X with the self-loop-free mean operator.
SparseMatrix neighbor_features(const SparseMatrix& features, const SparseRowStochastic& adjacency);

// Column concatenation ego || neighbour || structural restricted to `parts`.
// Throws ConfigError when the selection is empty or every selected block has
// zero width.
SparseMatrix assemble_features(const SparseMatrix& ego, const SparseMatrix& neighbor,
                               const SparseMatrix& structural, const std::vector<FeaturePart>& parts);

// One-hidden-layer classifier trained with cross-entropy on the training
// mask, early-stopped on validation accuracy. Returns the softmax outputs
// of the best-validation epoch.
SoftAssignment train_init(const SparseMatrix& features, std::span<const int> labels, int num_classes,
                          const SplitMasks& masks, const InitConfig& config);

// Outputs of the same classifier at its random initialization (no training).
SoftAssignment untrained_init(const SparseMatrix& features, std::span<const int> labels,
                              int num_classes, const SplitMasks& masks, const InitConfig& config);

// Wraps an assignment matrix, deriving hard labels and split accuracies.
SoftAssignment make_assignment(Matrix assignments, std::span<const int> labels, const SplitMasks& masks);

}  // namespace hdp
