#include "hdp/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "hdp/errors.hpp"

namespace hdp {

nlohmann::json EpochRecord::to_json() const {
  return {{"epoch", epoch},
          {"ce", ce},
          {"tpc", tpc},
          {"total", total},
          {"train_acc", train_accuracy},
          {"val_acc", val_accuracy},
          {"test_acc", test_accuracy},
          {"refresh", refreshed}};
}

nlohmann::json TrainReport::summary_json() const {
  return {{"dataset", dataset},
          {"split", split_id},
          {"seed", seed},
          {"epochs_run", epochs.size()},
          {"best_epoch", best_epoch},
          {"best_val_acc", best_val_accuracy},
          {"train_acc", train_accuracy},
          {"test_acc", test_accuracy},
          {"init_train_acc", init_train_accuracy},
          {"init_val_acc", init_val_accuracy},
          {"init_test_acc", init_test_accuracy},
          {"h_prime", h_prime},
          {"h_prime_fallback", h_prime_fallback},
          {"h_hat", h_hat},
          {"initial_partition", initial_partition.to_json()},
          {"final_partition", final_partition.to_json()},
          {"refresh_count", refresh_count},
          {"stop_reason", stop_reason}};
}

void TrainReport::write_jsonl(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const EpochRecord& r : epochs) out << r.to_json().dump() << '\n';
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd m;
  m.count = values.size();
  if (values.empty()) return m;
  for (double v : values) m.mean += v;
  m.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - m.mean) * (v - m.mean);
  m.std = std::sqrt(var / static_cast<double>(values.size()));
  return m;
}

std::string format_percent(const MeanStd& m) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f ± %.2f", 100.0 * m.mean, 100.0 * m.std);
  return buf;
}

namespace {

nlohmann::json stat_json(const MeanStd& m) {
  return {{"mean", m.mean}, {"std", m.std}, {"text", format_percent(m)}};
}

}  // namespace

nlohmann::json summarize(const std::string& dataset, const nlohmann::json& config,
                         const std::vector<TrainReport>& reports) {
  std::vector<double> test, val, init_test;
  nlohmann::json splits = nlohmann::json::array();
  for (const TrainReport& r : reports) {
    test.push_back(r.test_accuracy);
    val.push_back(r.best_val_accuracy);
    init_test.push_back(r.init_test_accuracy);
    splits.push_back(r.summary_json());
  }
  return {{"dataset", dataset},
          {"config", config},
          {"num_splits", reports.size()},
          {"test_acc", stat_json(mean_std(test))},
          {"val_acc", stat_json(mean_std(val))},
          {"init_test_acc", stat_json(mean_std(init_test))},
          {"splits", splits}};
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace hdp
