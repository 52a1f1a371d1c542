#pragma once

#include <span>
#include <vector>

#include "hdp/tape.hpp"

namespace hdp {

// High-confidence nodes used as contrastive anchors and prototype members.
struct TrustSet {
  std::vector<NodeId> nodes;         // ascending ids
  std::vector<int> predicted;        // hard label of each member, aligned with nodes
  double delta = 0.0;                // confidence threshold
  double rho = 0.0;                  // accuracy estimate that sized the set
};

struct Prototypes {
  Matrix centers;                    // K x D, mean ego representation per class
  std::vector<int> member_counts;    // per class
  std::vector<char> valid;           // false when a class has no trusted member
};

// Trust set of size floor(rho * N): nodes ranked by max probability (desc),
// ties by ascending node id. rho <= 0 gives an empty set.
TrustSet build_trust_set(const Matrix& assignments, double rho);

// Means of trusted members' representations grouped by predicted class.
Prototypes compute_prototypes(const Matrix& ego, const TrustSet& trust, int num_classes);

// Recorded loss heads.
Var cross_entropy(Tape& tape, Var assignments, std::span<const int> labels,
                  std::span<const NodeId> mask);
Var tpc_loss(Tape& tape, Var ego, const TrustSet& trust, const Prototypes& prototypes, double tau);
Var total_loss(Tape& tape, Var ce, Var tpc, double beta);

// Plain evaluations of the same heads.
double cross_entropy(const Matrix& assignments, std::span<const int> labels,
                     std::span<const NodeId> mask);
double tpc_loss(const Matrix& ego, const TrustSet& trust, const Prototypes& prototypes, double tau);
inline double total_loss(double ce, double tpc, double beta) { return ce + beta * tpc; }

// Fraction of mask nodes whose hard label equals the true label.
double accuracy(std::span<const int> predicted, std::span<const int> labels,
                std::span<const NodeId> mask);

}  // namespace hdp
