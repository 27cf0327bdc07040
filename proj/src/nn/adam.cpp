#include "varcast/nn/adam.hpp"

#include <cmath>

#include "varcast/errors.hpp"

namespace varcast::nn {

void adam_step(std::vector<double>& params, const std::vector<double>& grad,
               AdamState& state, const AdamConfig& config) {
  const std::size_t n = params.size();
  if (grad.size() != n || state.m.size() != n || state.v.size() != n) {
    throw NumericError("adam_step: shape mismatch");
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(config.beta1, state.step);
  const double c2 = 1.0 - std::pow(config.beta2, state.step);
  for (std::size_t i = 0; i < n; ++i) {
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * grad[i];
    state.v[i] =
        config.beta2 * state.v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
    double m_hat = state.m[i] / c1;
    double v_hat = state.v[i] / c2;
    params[i] -= config.learning_rate * m_hat /
                 (std::sqrt(v_hat) + config.epsilon);
  }
}

}  // namespace varcast::nn
