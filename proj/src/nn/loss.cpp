#include "varcast/nn/loss.hpp"

namespace varcast::nn {

double nll_loss(const stats::MixtureParams& pred, double y) {
  return -stats::mixture_logpdf(y, pred);
}

double reg_nll_loss(const stats::MixtureParams& pred, double y,
                    double lambda) {
  double nll = nll_loss(pred, y);
  if (lambda == 0.0) return nll;
  double penalty = 0.0;
  for (double p : pred.pi) penalty += p * p;
  return nll + lambda * penalty;
}

}  // namespace varcast::nn
