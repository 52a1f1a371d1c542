#pragma once

#include <random>
#include <string>
#include <vector>

#include "hdp/linalg.hpp"

namespace hdp {

// Weights, bias, their gradients and the optimizer's moment estimates for one
// affine map. All companion arrays share the weight/bias shapes.
struct ParamBlock {
  std::string name;
  Matrix weights;  // fan_in x fan_out
  RowVector bias;  // fan_out
  Matrix grad_weights;
  RowVector grad_bias;
  Matrix moment1_weights;
  Matrix moment2_weights;
  RowVector moment1_bias;
  RowVector moment2_bias;

  ParamBlock() = default;
  ParamBlock(std::string name, Eigen::Index fan_in, Eigen::Index fan_out);

  Eigen::Index fan_in() const { return weights.rows(); }
  Eigen::Index fan_out() const { return weights.cols(); }
  Eigen::Index size() const { return weights.size() + bias.size(); }

  // Uniform in +-sqrt(6 / (fan_in + fan_out)), zero bias.
  void glorot_init(std::mt19937_64& rng);
  void zero_grad();
  void reset_moments();
};

using ParamRefs = std::vector<ParamBlock*>;

// Snapshot of weights and biases only (used for best-epoch checkpoints).
struct ParamSnapshot {
  std::vector<std::string> names;
  std::vector<Matrix> weights;
  std::vector<RowVector> biases;

  static ParamSnapshot capture(const ParamRefs& params);
  void restore(const ParamRefs& params) const;
};

}  // namespace hdp
