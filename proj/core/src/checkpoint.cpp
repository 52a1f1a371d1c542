#include "hdp/checkpoint.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "hdp/errors.hpp"

namespace hdp {

namespace {

nlohmann::json matrix_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.data(), m.data() + m.size())}};
}

Matrix matrix_from(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw DataError("checkpoint matrix size mismatch");
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

nlohmann::json edges_json(const std::vector<Edge>& edges) {
  nlohmann::json a = nlohmann::json::array();
  for (const Edge& e : edges) a.push_back({e.u, e.v});
  return a;
}

std::vector<Edge> edges_from(const nlohmann::json& j) {
  std::vector<Edge> edges;
  for (const auto& e : j) edges.push_back({e.at(0).get<NodeId>(), e.at(1).get<NodeId>()});
  return edges;
}

}  // namespace

nlohmann::json Checkpoint::to_json() const {
  nlohmann::json blocks = nlohmann::json::array();
  for (std::size_t i = 0; i < params.names.size(); ++i) {
    blocks.push_back({{"name", params.names[i]},
                      {"weights", matrix_json(params.weights[i])},
                      {"bias", matrix_json(params.biases[i])}});
  }
  std::vector<int> is_hm(partition.is_hm.begin(), partition.is_hm.end());
  const bool inf = std::isinf(partition.epsilon);
  return {{"format_version", kCheckpointFormat},
          {"dataset", dataset},
          {"split", split_id},
          {"epoch", epoch},
          {"config", config.to_json()},
          {"blocks", blocks},
          {"partition",
           {{"hm_edges", edges_json(partition.hm_edges)},
            {"ht_edges", edges_json(partition.ht_edges)},
            {"is_hm", is_hm},
            {"epsilon", inf ? nlohmann::json("inf") : nlohmann::json(partition.epsilon)},
            {"h_hat", partition.h_hat},
            {"epoch_created", partition.epoch_created}}}};
}

Checkpoint Checkpoint::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != kCheckpointFormat) {
      throw DataError("unsupported checkpoint format_version");
    }
    Checkpoint c;
    c.dataset = j.at("dataset").get<std::string>();
    c.split_id = j.at("split").get<int>();
    c.epoch = j.at("epoch").get<int>();
    c.config = TrainConfig::from_json(j.at("config"));
    for (const auto& b : j.at("blocks")) {
      c.params.names.push_back(b.at("name").get<std::string>());
      c.params.weights.push_back(matrix_from(b.at("weights")));
      c.params.biases.push_back(matrix_from(b.at("bias")));
    }
    const auto& p = j.at("partition");
    c.partition.hm_edges = edges_from(p.at("hm_edges"));
    c.partition.ht_edges = edges_from(p.at("ht_edges"));
    for (int v : p.at("is_hm").get<std::vector<int>>()) c.partition.is_hm.push_back(static_cast<char>(v));
    const auto& eps = p.at("epsilon");
    c.partition.epsilon = eps.is_string() ? std::numeric_limits<double>::infinity() : eps.get<double>();
    c.partition.h_hat = p.at("h_hat").get<double>();
    c.partition.epoch_created = p.at("epoch_created").get<int>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

void Checkpoint::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << to_json().dump() << '\n';
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed checkpoint " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

}  // namespace hdp
