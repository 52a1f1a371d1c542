#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdp/partition.hpp"

namespace hdp {

struct EpochRecord {
  int epoch = 0;
  double ce = 0.0;
  double tpc = 0.0;
  double total = 0.0;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
  double test_accuracy = 0.0;
  bool refreshed = false;

  nlohmann::json to_json() const;
};

struct TrainReport {
  std::string dataset;
  int split_id = 0;
  std::uint64_t seed = 0;
  std::vector<EpochRecord> epochs;
  int best_epoch = -1;
  double best_val_accuracy = 0.0;
  double train_accuracy = 0.0;  // at the best epoch
  double test_accuracy = 0.0;   // at the best epoch
  double init_train_accuracy = 0.0;
  double init_val_accuracy = 0.0;
  double init_test_accuracy = 0.0;
  double h_prime = 0.0;
  bool h_prime_fallback = false;
  double h_hat = 0.0;
  PartitionQuality initial_partition;
  PartitionQuality final_partition;
  int refresh_count = 0;
  std::string stop_reason;  // "patience" or "epoch_limit"

  nlohmann::json summary_json() const;  // everything except the per-epoch log
  void write_jsonl(const std::filesystem::path& path) const;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  std::size_t count = 0;
};

MeanStd mean_std(const std::vector<double>& values);

// "77.10 ± 1.23" on a percentage scale.
std::string format_percent(const MeanStd& m);

// Aggregate over splits: test, validation and init-stage test accuracy.
nlohmann::json summarize(const std::string& dataset, const nlohmann::json& config,
                         const std::vector<TrainReport>& reports);

// Pretty JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace hdp
