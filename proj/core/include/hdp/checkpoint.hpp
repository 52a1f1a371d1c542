#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "hdp/config.hpp"
#include "hdp/params.hpp"
#include "hdp/partition.hpp"

namespace hdp {

inline constexpr int kCheckpointFormat = 1;

// Parameters plus the partition they were evaluated with.
struct Checkpoint {
  std::string dataset;
  int split_id = 0;
  int epoch = -1;
  TrainConfig config;
  ParamSnapshot params;
  Partition partition;

  nlohmann::json to_json() const;
  static Checkpoint from_json(const nlohmann::json& j);

  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);
};

}  // namespace hdp
