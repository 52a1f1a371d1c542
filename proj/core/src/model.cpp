#include "hdp/model.hpp"

#include <string>

#include "hdp/errors.hpp"

namespace hdp {
namespace {

ParamBlock make_block(const std::string& name, Eigen::Index in, Eigen::Index out,
                      std::mt19937_64& rng) {
  ParamBlock p(name, in, out);
  p.glorot_init(rng);
  return p;
}

}  // namespace

HdpModel::HdpModel(const ModelConfig& config, std::mt19937_64& rng) : config_(config) {
  if (config.input_dim <= 0) throw DimensionError("model input width must be positive");
  if (config.num_classes < 1) throw ConfigError("model needs at least one class");
  if (!config.use_hm && !config.use_ht) throw ConfigError("classifier needs at least one channel");
  if (config.layers_hm < 0 || config.layers_ht < 0) throw ConfigError("layer counts must be >= 0");
  const Eigen::Index d = config.embedding_dim;
  encoder_hidden_ = make_block("ego.hidden", config.input_dim, config.hidden_dim, rng);
  encoder_out_ = make_block("ego.out", config.hidden_dim, d, rng);
  for (int l = 0; l < config.layers_hm; ++l) {
    gates_hm_.push_back(make_block("gate.hm." + std::to_string(l), 2 * d, 1, rng));
  }
  for (int l = 0; l < config.layers_ht; ++l) {
    gates_ht_.push_back(make_block("gate.ht." + std::to_string(l), 2 * d, 1, rng));
  }
  const Eigen::Index width = (config.use_hm ? d : 0) + (config.use_ht ? d : 0);
  classifier_ = make_block("classifier", width, config.num_classes, rng);
}

ParamRefs HdpModel::parameters() {
  ParamRefs refs{&encoder_hidden_, &encoder_out_};
  for (auto& g : gates_hm_) refs.push_back(&g);
  for (auto& g : gates_ht_) refs.push_back(&g);
  refs.push_back(&classifier_);
  return refs;
}

Var HdpModel::ego_forward(Tape& tape, const SparseMatrix& ego_input, std::mt19937_64* dropout_rng) {
  if (ego_input.cols() != config_.input_dim) {
    throw DimensionError("ego input has " + std::to_string(ego_input.cols()) + " columns, model expects " +
                         std::to_string(config_.input_dim));
  }
  Var hidden = tape.relu(tape.affine(ego_input, encoder_hidden_));
  if (dropout_rng) hidden = tape.dropout(hidden, config_.dropout, *dropout_rng);
  return tape.affine(hidden, encoder_out_);
}

Var HdpModel::neighbor_distribution(Tape& tape, const SparseMatrix& ht_operator, Var ego) {
  return tape.spmm(ht_operator, ego);
}

Var HdpModel::smp_layer(Tape& tape, Var h0, Var previous, const SparseMatrix& hm_operator,
                        ParamBlock& gate) {
  Var aggregated = tape.spmm(hm_operator, previous);
  Var alpha = tape.sigmoid(tape.affine(tape.concat(h0, aggregated), gate));
  return tape.gate_mix(alpha, h0, aggregated);
}

Var HdpModel::smp(Tape& tape, Var h0, const SparseMatrix& hm_operator, std::vector<ParamBlock>& gates) {
  Var h = h0;
  for (ParamBlock& gate : gates) h = smp_layer(tape, h0, h, hm_operator, gate);
  return h;
}

Var HdpModel::classify(Tape& tape, Var hm, Var ht, Var* combined) {
  Var input;
  if (config_.use_hm && config_.use_ht) {
    input = tape.concat(hm, ht);
  } else {
    input = config_.use_hm ? hm : ht;
  }
  if (combined) *combined = input;
  return tape.row_softmax(tape.affine(input, classifier_));
}

ForwardPass HdpModel::forward(Tape& tape, const SparseMatrix& ego_input, const PartitionOperators& ops,
                              std::mt19937_64* dropout_rng) {
  ForwardPass f;
  f.ego = ego_forward(tape, ego_input, dropout_rng);
  f.neighbor = neighbor_distribution(tape, ops.ht, f.ego);
  f.ht = smp(tape, f.neighbor, ops.hm, gates_ht_);
  f.hm = smp(tape, f.ego, ops.hm, gates_hm_);
  f.assignments = classify(tape, f.hm, f.ht, &f.combined);
  return f;
}

}  // namespace hdp
