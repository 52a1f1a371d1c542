#include "hdp/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "hdp/errors.hpp"

namespace hdp {

SearchSpace SearchSpace::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("search space must be a JSON object of value lists");
  SearchSpace s;
  for (const auto& item : j.items()) {
    if (!item.value().is_array() || item.value().empty()) {
      throw ConfigError("search axis '" + item.key() + "' must be a nonempty list");
    }
    s.axes.emplace_back(item.key(), item.value().get<std::vector<nlohmann::json>>());
  }
  return s;
}

std::size_t SearchSpace::size() const {
  std::size_t n = 1;
  for (const auto& axis : axes) n *= axis.second.size();
  return n;
}

nlohmann::json SearchSpace::point(std::size_t index) const {
  nlohmann::json out = nlohmann::json::object();
  for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
    out[it->first] = it->second[index % it->second.size()];
    index /= it->second.size();
  }
  return out;
}

namespace {

struct Evaluation {
  LeaderboardEntry entry;
  std::size_t order = 0;
  std::vector<TrainReport> reports;
};

class Evaluator {
 public:
  Evaluator(const Graph& graph, const std::vector<SplitMasks>& splits, const TrainConfig& base,
            const SearchSpace& space, const SweepOptions& options)
      : graph_(graph), splits_(splits), base_(base), space_(space), options_(options) {}

  double operator()(std::size_t index) {
    if (auto it = seen_.find(index); it != seen_.end()) return it->second.entry.val_mean;
    const nlohmann::json overrides = space_.point(index);
    const TrainConfig config = with_overrides(base_, overrides);
    std::vector<double> vals;
    std::vector<TrainReport> reports;
    for (const SplitMasks& m : splits_) {
      reports.push_back(train(graph_, m, config, options_.train).report);
      vals.push_back(reports.back().best_val_accuracy);
    }
    const MeanStd ms = mean_std(vals);
    Evaluation e{{overrides, ms.mean, ms.std}, seen_.size(), std::move(reports)};
    if (options_.on_entry) options_.on_entry(e.entry);
    seen_.emplace(index, e);
    return ms.mean;
  }

  std::vector<Evaluation> evaluations() const {
    std::vector<Evaluation> out;
    for (const auto& kv : seen_) out.push_back(kv.second);
    std::sort(out.begin(), out.end(), [](const Evaluation& a, const Evaluation& b) {
      if (a.entry.val_mean != b.entry.val_mean) return a.entry.val_mean > b.entry.val_mean;
      return a.order < b.order;
    });
    return out;
  }

 private:
  const Graph& graph_;
  const std::vector<SplitMasks>& splits_;
  const TrainConfig& base_;
  const SearchSpace& space_;
  const SweepOptions& options_;
  std::map<std::size_t, Evaluation> seen_;
};

// Index of a random single-axis move away from `index`.
std::size_t neighbour(const SearchSpace& space, std::size_t index, std::mt19937_64& rng) {
  std::vector<std::size_t> movable;
  for (std::size_t a = 0; a < space.axes.size(); ++a) {
    if (space.axes[a].second.size() > 1) movable.push_back(a);
  }
  if (movable.empty()) return index;
  const std::size_t axis = movable[std::uniform_int_distribution<std::size_t>(0, movable.size() - 1)(rng)];
  std::size_t stride = 1;
  for (std::size_t a = space.axes.size(); a-- > axis + 1;) stride *= space.axes[a].second.size();
  const std::size_t n = space.axes[axis].second.size();
  const std::size_t current = (index / stride) % n;
  std::size_t next = std::uniform_int_distribution<std::size_t>(0, n - 2)(rng);
  if (next >= current) ++next;
  return index - current * stride + next * stride;
}

}  // namespace

SweepResult sweep(const Graph& graph, const std::vector<SplitMasks>& splits, const TrainConfig& base,
                  const SearchSpace& space, const SweepOptions& options) {
  if (splits.empty()) throw ConfigError("sweep needs at least one split");
  Evaluator eval(graph, splits, base, space, options);
  const std::size_t total = space.size();
  if (options.strategy == SweepOptions::Strategy::kGrid) {
    for (std::size_t i = 0; i < total; ++i) eval(i);
  } else {
    std::mt19937_64 rng(options.seed);
    std::size_t current = std::uniform_int_distribution<std::size_t>(0, total - 1)(rng);
    double current_score = eval(current);
    double temperature = options.initial_temperature;
    for (std::size_t step = 1; step < options.budget; ++step) {
      const std::size_t candidate = neighbour(space, current, rng);
      const double score = eval(candidate);
      const double accept = score >= current_score ? 1.0 : std::exp((score - current_score) / std::max(temperature, 1e-12));
      if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < accept) {
        current = candidate;
        current_score = score;
      }
      temperature *= options.cooling;
    }
  }

  SweepResult result;
  std::vector<Evaluation> ranked = eval.evaluations();
  for (const Evaluation& e : ranked) result.leaderboard.push_back(e.entry);
  result.best_overrides = result.leaderboard.front().overrides;
  result.best_config = with_overrides(base, result.best_overrides);
  result.best_reports = std::move(ranked.front().reports);
  return result;
}

nlohmann::json leaderboard_json(const SweepResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const LeaderboardEntry& e : result.leaderboard) {
    rows.push_back({{"overrides", e.overrides}, {"val_mean", e.val_mean}, {"val_std", e.val_std}});
  }
  std::vector<double> test;
  for (const TrainReport& r : result.best_reports) test.push_back(r.test_accuracy);
  const MeanStd t = mean_std(test);
  return {{"leaderboard", rows},
          {"selected", result.best_overrides},
          {"selected_config", result.best_config.to_json()},
          {"selected_test_acc", {{"mean", t.mean}, {"std", t.std}, {"text", format_percent(t)}}}};
}

}  // namespace hdp
