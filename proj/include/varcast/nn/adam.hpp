#pragma once

#include <cstddef>
#include <vector>

namespace varcast::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double learning_rate = 0.001;
  double epsilon = 1e-7;
  std::size_t batch_size = 32;
};

/// Moment accumulators, flat like the parameters they track.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t step = 0;

  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

/// One Adam update in place. Bias correction uses 1 - beta^t with the step
/// exponent, so the first steps are scaled correctly.
void adam_step(std::vector<double>& params, const std::vector<double>& grad,
               AdamState& state, const AdamConfig& config = {});

}  // namespace varcast::nn
