#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hdp/linalg.hpp"
#include "hdp/params.hpp"

namespace hdp {

class Tape;

// Handle to a value recorded on a Tape.
class Var {
 public:
  Var() = default;

  bool valid() const { return tape_ != nullptr; }
  std::size_t id() const { return id_; }

 private:
  friend class Tape;
  Var(const Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  const Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Inputs of the prototype contrastive head. Prototypes are constants: no
// gradient flows into them.
struct ContrastiveTargets {
  std::vector<NodeId> anchors;
  std::vector<int> anchor_classes;
  Matrix prototypes;             // K x D
  std::vector<char> valid;       // per class; invalid prototypes are skipped
  double tau = 0.5;
};

// Cosine similarity with the zero-vector guard used throughout: 0 when either
// operand has norm below 1e-12.
double cosine_similarity(const Eigen::Ref<const RowVector>& a, const Eigen::Ref<const RowVector>& b);

// Reverse-mode recorder over the closed operation set used by the model.
// Every operation evaluates eagerly and records how to propagate gradients.
// Sparse operands are treated as constants and must outlive the tape.
class Tape {
 public:
  enum class Op {
    kConstant,
    kAffine,
    kSparseAffine,
    kRelu,
    kSigmoid,
    kRowSoftmax,
    kConcat,
    kSpmm,
    kGateMix,
    kDropout,
    kCrossEntropy,
    kContrastive,
    kLinearCombination,
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);

  // input * W + b (broadcast per row).
  Var affine(Var input, ParamBlock& params);
  Var affine(const SparseMatrix& input, ParamBlock& params);

  Var relu(Var x);
  Var sigmoid(Var x);
  // Stable softmax per row (max subtracted first).
  Var row_softmax(Var x);
  Var concat(Var left, Var right);
  // a * x with constant sparse a.
  Var spmm(const SparseMatrix& a, Var x);
  // alpha (N x 1) * h0 + (1 - alpha) * mixed, alpha broadcast across columns.
  Var gate_mix(Var alpha, Var h0, Var mixed);
  // Inverted dropout; identity when rate == 0.
  Var dropout(Var x, double rate, std::mt19937_64& rng);

  // Mean over mask of -log(max(p[i, label_i], 1e-12)). 1 x 1 output.
  Var cross_entropy(Var probs, std::span<const int> labels, std::span<const NodeId> mask);
  // Mean over anchors of -log(exp(s_pos / tau) / sum_k exp(max(s_k, 0) / tau)),
  // cosine similarities against constant prototypes. 1 x 1 output; 0 without anchors.
  Var prototype_contrastive(Var h, ContrastiveTargets targets);
  // wa * a + wb * b for equally shaped values.
  Var linear_combination(Var a, double wa, Var b, double wb);

  const Matrix& value(Var v) const;
  const Matrix& grad(Var v) const;
  double scalar(Var v) const;
  Op op(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  // Accumulates d(loss)/d(param) into every ParamBlock reached from loss.
  // Loss must be a 1 x 1 value recorded on this tape; a tape can be
  // differentiated once.
  void backward(Var loss);

 private:
  struct Node {
    Op op = Op::kConstant;
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    std::function<void(Tape&, std::size_t)> propagate;
  };

  std::size_t check(Var v) const;
  Var push(Op op, Matrix value, bool requires_grad, std::function<void(Tape&, std::size_t)> propagate);
  Matrix& grad_buffer(std::size_t id);
  bool needs(std::size_t id) const { return nodes_[id].requires_grad; }

  std::vector<Node> nodes_;
  bool differentiated_ = false;
};

}  // namespace hdp
