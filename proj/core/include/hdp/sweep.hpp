#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdp/trainer.hpp"

namespace hdp {

// Candidate values per config key. Keys are visited in sorted order and the
// cartesian product is enumerated with the last key varying fastest.
struct SearchSpace {
  std::vector<std::pair<std::string, std::vector<nlohmann::json>>> axes;

  static SearchSpace from_json(const nlohmann::json& j);
  std::size_t size() const;
  nlohmann::json point(std::size_t index) const;  // overrides for one grid point
};

struct LeaderboardEntry {
  nlohmann::json overrides;
  double val_mean = 0.0;
  double val_std = 0.0;
};

struct SweepResult {
  TrainConfig best_config;
  nlohmann::json best_overrides;
  std::vector<LeaderboardEntry> leaderboard;  // sorted by val_mean desc, then evaluation order
  std::vector<TrainReport> best_reports;      // one per split, for the selected config
};

struct SweepOptions {
  enum class Strategy { kGrid, kAnneal } strategy = Strategy::kGrid;
  std::size_t budget = 20;         // evaluations for anneal
  double initial_temperature = 0.02;
  double cooling = 0.9;
  std::uint64_t seed = 0;
  TrainOptions train;
  std::function<void(const LeaderboardEntry&)> on_entry;
};

// Picks the point with the highest mean validation accuracy over `splits`.
// Test accuracy is only collected for the selected configuration.
SweepResult sweep(const Graph& graph, const std::vector<SplitMasks>& splits, const TrainConfig& base,
                  const SearchSpace& space, const SweepOptions& options = {});

nlohmann::json leaderboard_json(const SweepResult& result);

}  // namespace hdp
