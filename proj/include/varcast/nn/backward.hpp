#pragma once

#include <vector>

#include "varcast/nn/network.hpp"

namespace varcast::nn {

struct BackwardResult {
  std::vector<double> grad;  // same flat layout as NetworkParams::values
  double mean_loss = 0.0;
};

/// Gradient of the mean batch loss (the config's loss kind, including the
/// pi regularizer when active) with respect to every parameter, by exact
/// reverse-mode differentiation through the trace of each forward pass.
BackwardResult backward(const std::vector<std::vector<double>>& windows,
                        const std::vector<double>& targets,
                        const NetworkParams& params);

}  // namespace varcast::nn
