#include "hdp/params.hpp"

#include <cmath>

#include "hdp/errors.hpp"

namespace hdp {

ParamBlock::ParamBlock(std::string block_name, Eigen::Index fan_in, Eigen::Index fan_out)
    : name(std::move(block_name)),
      weights(Matrix::Zero(fan_in, fan_out)),
      bias(RowVector::Zero(fan_out)) {
  if (fan_in <= 0 || fan_out <= 0) {
    throw DimensionError("parameter block " + name + " needs positive dimensions");
  }
  zero_grad();
  reset_moments();
}

void ParamBlock::glorot_init(std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in() + fan_out()));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (Eigen::Index i = 0; i < weights.size(); ++i) weights.data()[i] = dist(rng);
  bias.setZero();
}

void ParamBlock::zero_grad() {
  grad_weights = Matrix::Zero(weights.rows(), weights.cols());
  grad_bias = RowVector::Zero(bias.size());
}

void ParamBlock::reset_moments() {
  moment1_weights = Matrix::Zero(weights.rows(), weights.cols());
  moment2_weights = Matrix::Zero(weights.rows(), weights.cols());
  moment1_bias = RowVector::Zero(bias.size());
  moment2_bias = RowVector::Zero(bias.size());
}

ParamSnapshot ParamSnapshot::capture(const ParamRefs& params) {
  ParamSnapshot s;
  for (const ParamBlock* p : params) {
    s.names.push_back(p->name);
    s.weights.push_back(p->weights);
    s.biases.push_back(p->bias);
  }
  return s;
}

void ParamSnapshot::restore(const ParamRefs& params) const {
  if (params.size() != names.size()) throw ContractViolation("snapshot/parameter count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->name != names[i] || params[i]->weights.rows() != weights[i].rows() ||
        params[i]->weights.cols() != weights[i].cols()) {
      throw ContractViolation("snapshot does not match parameter block " + params[i]->name);
    }
    params[i]->weights = weights[i];
    params[i]->bias = biases[i];
  }
}

}  // namespace hdp
