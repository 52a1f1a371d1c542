#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdp/assignment_init.hpp"

namespace hdp {

enum class RefreshPolicy { kOnImprovement, kNever };
enum class InitMode { kTrained, kUntrained };

enum class Ablation { kNone, kNoTpc, kNoSse, kNoHm, kNoHt, kNoSmp, kNoUpd, kNoInit };

struct TrainConfig {
  // assignment initialization
  std::vector<FeaturePart> feature_parts{FeaturePart::kEgo, FeaturePart::kNeighbor};
  double learning_rate_init = 0.01;
  double weight_decay_init = 5e-4;
  int epoch_init = 500;
  int patience_init = 100;
  InitMode init_mode = InitMode::kTrained;

  // main model
  long structural_dim = 512;  // 0 disables the structural encoding
  Eigen::Index hidden_dim = 512;
  Eigen::Index embedding_dim = 128;
  double learning_rate = 0.003;
  double weight_decay = 5e-4;
  int epoch = 2000;
  int patience = 100;
  int order = 1;
  double beta = 1.0;
  double tau = 0.2;
  double lambda = 1.0;
  int kappa = 4;
  int layers_hm = 2;
  int layers_ht = 2;
  bool use_hm = true;
  bool use_ht = true;
  double sharpen = 4.0;
  double dropout = 0.0;
  bool normalize_features = false;
  RefreshPolicy refresh = RefreshPolicy::kOnImprovement;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  // Unknown keys and out-of-range values throw one ConfigError naming every
  // offending key.
  static TrainConfig from_json(const nlohmann::json& j);
  void validate() const;

  InitConfig init_config(int split_id) const;
  std::uint64_t split_seed(int split_id) const { return seed + static_cast<std::uint64_t>(split_id); }
};

TrainConfig load_config(const std::filesystem::path& path);

// Merges `overrides` into the JSON form of `base` and re-validates.
TrainConfig with_overrides(const TrainConfig& base, const nlohmann::json& overrides);

Ablation parse_ablation(const std::string& name);
std::string to_string(Ablation ablation);
const std::vector<Ablation>& all_ablations();
TrainConfig apply_ablation(TrainConfig config, Ablation ablation);

// Lowercase hex SHA-256 of the canonical JSON dump.
std::string content_hash(const nlohmann::json& j);

}  // namespace hdp
