#pragma once

#include "varcast/mixture.hpp"

namespace varcast::nn {

/// Negative log-likelihood of the target under the predicted mixture.
double nll_loss(const stats::MixtureParams& pred, double y);

/// NLL plus lambda * sum_k pi_k^2. At lambda == 0 this returns nll_loss
/// unchanged, bit for bit.
double reg_nll_loss(const stats::MixtureParams& pred, double y, double lambda);

}  // namespace varcast::nn
