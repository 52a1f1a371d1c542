#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "hdp/cache.hpp"
#include "hdp/checkpoint.hpp"
#include "hdp/config.hpp"
#include "hdp/graph.hpp"
#include "hdp/losses.hpp"
#include "hdp/model.hpp"
#include "hdp/report.hpp"
#include "hdp/structural_encoding.hpp"

namespace hdp {

// Split-dependent inputs shared by initialization, training and evaluation.
struct PreparedInputs {
  SparseMatrix features;    // X, rows optionally normalized
  SparseMatrix structural;  // X^str, N x 0 when disabled
  SparseMatrix ego_input;   // X || X^str
  std::vector<NodeId> targets;
  EdgeSet edges;            // E'
  TrainHomophily homophily;
};

PreparedInputs prepare_inputs(const Graph& graph, const SplitMasks& masks, const TrainConfig& config);

// Cache key for the initial assignments of (dataset, split, init-relevant config).
std::string init_cache_key(const std::string& dataset, int split_id, const TrainConfig& config);

// Initial soft assignments, read from or stored into `cache` when given.
SoftAssignment initial_assignment(const Graph& graph, const SplitMasks& masks, const TrainConfig& config,
                                  const PreparedInputs& inputs, const MatrixCache* cache = nullptr);

// Partition of E' from assignments, with the rescaled homophily quota.
Partition partition_from(const Matrix& assignments, const PreparedInputs& inputs, double lambda,
                         double sharpen, int epoch_created = -1);

ModelConfig model_config(const TrainConfig& config, const PreparedInputs& inputs, int num_classes);

struct TrainOptions {
  const MatrixCache* cache = nullptr;
  // On a non-finite loss the last good checkpoint and a diagnostic JSON are
  // written here before NumericError is thrown.
  std::optional<std::filesystem::path> failure_dir;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
  HdpModel model;          // restored to the best-validation parameters
  Partition partition;     // the partition those parameters were evaluated with
  PartitionOperators operators;
  Matrix assignments;      // Z at the best epoch
  TrainReport report;
  Checkpoint checkpoint;
};

TrainResult train(const Graph& graph, const SplitMasks& masks, const TrainConfig& config,
                  const TrainOptions& options = {});

// Forward pass without dropout.
Matrix predict(HdpModel& model, const SparseMatrix& ego_input, const PartitionOperators& ops);

double evaluate(HdpModel& model, const SparseMatrix& ego_input, const PartitionOperators& ops,
                std::span<const int> labels, std::span<const NodeId> mask);

// Rebuilds the model of a checkpoint for the given graph and split.
struct RestoredModel {
  HdpModel model;
  PreparedInputs inputs;
  PartitionOperators operators;
};
RestoredModel restore(const Checkpoint& checkpoint, const Graph& graph, const SplitMasks& masks);

}  // namespace hdp
