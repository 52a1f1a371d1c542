#include "hdp/optimizer.hpp"

#include <cmath>

#include "hdp/errors.hpp"

namespace hdp {
namespace {

template <typename M>
void update(M& value, const M& grad, M& m1, M& m2, const OptimizerConfig& c, double correction1,
            double correction2) {
  if (c.weight_decay != 0.0) value *= (1.0 - c.learning_rate * c.weight_decay);
  m1 = c.beta1 * m1 + (1.0 - c.beta1) * grad;
  m2 = c.beta2 * m2 + (1.0 - c.beta2) * grad.cwiseProduct(grad);
  const double lr = c.learning_rate;
  value.array() -=
      lr * (m1.array() / correction1) / ((m2.array() / correction2).sqrt() + c.epsilon);
}

}  // namespace

void adam_step(const ParamRefs& params, OptimizerConfig& config) {
  if (config.learning_rate <= 0.0) throw ConfigError("learning rate must be positive");
  ++config.step_count;
  const double t = static_cast<double>(config.step_count);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (ParamBlock* p : params) {
    update(p->weights, p->grad_weights, p->moment1_weights, p->moment2_weights, config,
           correction1, correction2);
    update(p->bias, p->grad_bias, p->moment1_bias, p->moment2_bias, config, correction1,
           correction2);
  }
}

}  // namespace hdp
