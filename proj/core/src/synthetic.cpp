#include "hdp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "hdp/errors.hpp"

namespace hdp {

Graph make_synthetic_graph(const SyntheticSpec& spec) {
  if (spec.num_nodes < 2 || spec.num_classes < 1 || spec.num_features < 1) {
    throw ConfigError("synthetic graph needs N >= 2, K >= 1, F >= 1");
  }
  std::mt19937_64 rng(spec.seed);
  Graph g;
  g.name = "synthetic";
  g.num_nodes = spec.num_nodes;
  g.num_classes = spec.num_classes;
  g.labels.resize(static_cast<std::size_t>(spec.num_nodes));
  for (NodeId i = 0; i < spec.num_nodes; ++i) g.labels[i] = static_cast<int>(i % spec.num_classes);
  std::shuffle(g.labels.begin(), g.labels.end(), rng);

  std::vector<std::vector<NodeId>> by_class(static_cast<std::size_t>(spec.num_classes));
  for (NodeId i = 0; i < spec.num_nodes; ++i) by_class[g.labels[i]].push_back(i);

  std::set<Edge> edges;
  const auto target = static_cast<std::size_t>(std::llround(spec.average_degree * spec.num_nodes / 2.0));
  std::uniform_int_distribution<NodeId> pick(0, spec.num_nodes - 1);
  std::bernoulli_distribution same(spec.homophily);
  std::size_t attempts = 0;
  while (edges.size() < target && attempts++ < 50 * target + 100) {
    const NodeId u = pick(rng);
    NodeId v;
    if (same(rng) || spec.num_classes == 1) {
      const auto& pool = by_class[g.labels[u]];
      v = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
    } else {
      do {
        v = pick(rng);
      } while (g.labels[v] == g.labels[u]);
    }
    if (u != v) edges.insert(Edge::canonical(u, v));
  }
  g.edges.assign(edges.begin(), edges.end());
  g.raw_edge_count = 2 * g.edges.size();

  std::normal_distribution<double> noise(0.0, 1.0);
  Matrix means(spec.num_classes, spec.num_features);
  for (Eigen::Index i = 0; i < means.size(); ++i) means.data()[i] = spec.feature_signal * noise(rng);
  std::bernoulli_distribution keep(spec.feature_density);
  g.features.resize(spec.num_nodes, spec.num_features);
  for (NodeId i = 0; i < spec.num_nodes; ++i) {
    for (Eigen::Index f = 0; f < spec.num_features; ++f) {
      const double x = means(g.labels[i], f) + noise(rng);
      g.features(i, f) = keep(rng) ? std::abs(x) : 0.0;
    }
  }
  g.validate();
  return g;
}

SplitMasks random_split(NodeId num_nodes, int split_id, std::uint64_t seed) {
  std::vector<NodeId> perm(static_cast<std::size_t>(num_nodes));
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed + static_cast<std::uint64_t>(split_id));
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::lround(0.48 * num_nodes));
  const auto n_val = static_cast<std::size_t>(std::lround(0.32 * num_nodes));
  SplitMasks m;
  m.split_id = split_id;
  m.train.assign(perm.begin(), perm.begin() + n_train);
  m.val.assign(perm.begin() + n_train, perm.begin() + n_train + n_val);
  m.test.assign(perm.begin() + n_train + n_val, perm.end());
  std::sort(m.train.begin(), m.train.end());
  std::sort(m.val.begin(), m.val.end());
  std::sort(m.test.begin(), m.test.end());
  return m;
}

}  // namespace hdp
