#include "hdp/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hdp/errors.hpp"

namespace hdp {

TrustSet build_trust_set(const Matrix& assignments, double rho) {
  TrustSet trust;
  trust.rho = rho;
  const auto n = static_cast<std::size_t>(assignments.rows());
  if (rho <= 0.0 || n == 0) {
    trust.delta = std::numeric_limits<double>::infinity();
    return trust;
  }
  if (rho > 1.0) throw ConfigError("trust ratio must not exceed 1");
  const auto quota = std::min(n, static_cast<std::size_t>(std::floor(rho * static_cast<double>(n) + 1e-9)));
  ColVector zmax = assignments.rowwise().maxCoeff();
  const std::vector<int> hard = row_argmax(assignments);
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return zmax(a) > zmax(b); });
  order.resize(quota);
  std::sort(order.begin(), order.end());
  trust.delta = std::numeric_limits<double>::infinity();
  for (NodeId v : order) {
    trust.nodes.push_back(v);
    trust.predicted.push_back(hard[static_cast<std::size_t>(v)]);
    trust.delta = std::min(trust.delta, zmax(v));
  }
  return trust;
}

Prototypes compute_prototypes(const Matrix& ego, const TrustSet& trust, int num_classes) {
  Prototypes p;
  p.centers = Matrix::Zero(num_classes, ego.cols());
  p.member_counts.assign(static_cast<std::size_t>(num_classes), 0);
  for (std::size_t k = 0; k < trust.nodes.size(); ++k) {
    const int c = trust.predicted[k];
    if (c < 0 || c >= num_classes) throw ContractViolation("trusted label outside class range");
    p.centers.row(c) += ego.row(trust.nodes[k]);
    ++p.member_counts[static_cast<std::size_t>(c)];
  }
  p.valid.assign(static_cast<std::size_t>(num_classes), 0);
  for (int c = 0; c < num_classes; ++c) {
    const int count = p.member_counts[static_cast<std::size_t>(c)];
    if (count > 0) {
      p.centers.row(c) /= static_cast<double>(count);
      p.valid[static_cast<std::size_t>(c)] = 1;
    }
  }
  return p;
}

Var cross_entropy(Tape& tape, Var assignments, std::span<const int> labels,
                  std::span<const NodeId> mask) {
  return tape.cross_entropy(assignments, labels, mask);
}

Var tpc_loss(Tape& tape, Var ego, const TrustSet& trust, const Prototypes& prototypes, double tau) {
  ContrastiveTargets targets;
  targets.anchors = trust.nodes;
  targets.anchor_classes = trust.predicted;
  targets.prototypes = prototypes.centers;
  targets.valid = prototypes.valid;
  targets.tau = tau;
  return tape.prototype_contrastive(ego, std::move(targets));
}

Var total_loss(Tape& tape, Var ce, Var tpc, double beta) {
  return tape.linear_combination(ce, 1.0, tpc, beta);
}

double cross_entropy(const Matrix& assignments, std::span<const int> labels,
                     std::span<const NodeId> mask) {
  Tape tape;
  return tape.scalar(tape.cross_entropy(tape.constant(assignments), labels, mask));
}

double tpc_loss(const Matrix& ego, const TrustSet& trust, const Prototypes& prototypes, double tau) {
  Tape tape;
  return tape.scalar(tpc_loss(tape, tape.constant(ego), trust, prototypes, tau));
}

double accuracy(std::span<const int> predicted, std::span<const int> labels,
                std::span<const NodeId> mask) {
  if (mask.empty()) return 0.0;
  std::size_t correct = 0;
  for (NodeId v : mask) {
    if (predicted[static_cast<std::size_t>(v)] == labels[static_cast<std::size_t>(v)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(mask.size());
}

}  // namespace hdp
