#pragma once

#include <random>
#include <vector>

#include "hdp/params.hpp"
#include "hdp/partition.hpp"
#include "hdp/tape.hpp"

namespace hdp {

struct ModelConfig {
  Eigen::Index input_dim = 0;  // F + |targets|
  Eigen::Index hidden_dim = 512;
  Eigen::Index embedding_dim = 128;
  int num_classes = 0;
  int layers_hm = 2;
  int layers_ht = 2;
  bool use_hm = true;  // feed the homophilous channel to the classifier
  bool use_ht = true;  // feed the heterophilous channel to the classifier
  double dropout = 0.0;
};

// Recorded intermediates of one forward pass.
struct ForwardPass {
  Var ego;        // H^ego
  Var neighbor;   // H^nb
  Var hm;         // homophilous channel output
  Var ht;         // heterophilous channel output
  Var combined;   // classifier input
  Var assignments;  // row-stochastic Z
};

// Ego encoder, two gated propagation stacks and a softmax classifier.
class HdpModel {
 public:
  HdpModel(const ModelConfig& config, std::mt19937_64& rng);

  HdpModel(const HdpModel&) = delete;
  HdpModel& operator=(const HdpModel&) = delete;
  HdpModel(HdpModel&&) = default;

  const ModelConfig& config() const { return config_; }
  ParamRefs parameters();

  // One-hidden-layer relu MLP on [X || X^str].
  Var ego_forward(Tape& tape, const SparseMatrix& ego_input, std::mt19937_64* dropout_rng) ;
  // Mean of heterophilous neighbours' ego rows; zero rows without such neighbours.
  Var neighbor_distribution(Tape& tape, const SparseMatrix& ht_operator, Var ego);
  // One gated propagation step over the homophilous operator.
  Var smp_layer(Tape& tape, Var h0, Var previous, const SparseMatrix& hm_operator, ParamBlock& gate);
  // `gates.size()` sequential layers; identity without layers.
  Var smp(Tape& tape, Var h0, const SparseMatrix& hm_operator, std::vector<ParamBlock>& gates);
  // Z = softmax(f([hm || ht])) restricted to the enabled channels.
  Var classify(Tape& tape, Var hm, Var ht, Var* combined = nullptr);

  ForwardPass forward(Tape& tape, const SparseMatrix& ego_input, const PartitionOperators& ops,
                      std::mt19937_64* dropout_rng = nullptr);

  // Gate learners per channel, exposed for tests.
  std::vector<ParamBlock>& gates_hm() { return gates_hm_; }
  std::vector<ParamBlock>& gates_ht() { return gates_ht_; }

 private:
  ModelConfig config_;
  ParamBlock encoder_hidden_;
  ParamBlock encoder_out_;
  std::vector<ParamBlock> gates_hm_;
  std::vector<ParamBlock> gates_ht_;
  ParamBlock classifier_;
};

}  // namespace hdp
