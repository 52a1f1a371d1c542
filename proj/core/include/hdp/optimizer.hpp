#pragma once

#include <cstdint>

#include "hdp/params.hpp"

namespace hdp {

struct OptimizerConfig {
  double learning_rate = 0.01;
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step_count = 0;
};

// Bias-corrected adaptive-moment step. Weight decay is decoupled: weights and
// biases are shrunk by (1 - lr * weight_decay) before the moment update.
// Increments config.step_count.
void adam_step(const ParamRefs& params, OptimizerConfig& config);

}  // namespace hdp
