#pragma once

#include <cstddef>
#include <vector>

#include "varcast/rng.hpp"

namespace varcast::stats {

/// One day's Gaussian mixture: K weights, locations and scales.
struct MixtureParams {
  std::vector<double> pi;
  std::vector<double> mu;
  std::vector<double> sigma;

  std::size_t components() const { return pi.size(); }

  /// Enforces the invariants: equal sizes, K >= 1, pi in [0,1] summing to 1
  /// within 1e-9, sigma > 0. Throws NumericError otherwise.
  void validate() const;
};

/// log sum_k pi_k N(y | mu_k, sigma_k^2), evaluated with the max-shift
/// (log-sum-exp) trick so narrow components do not underflow.
double mixture_logpdf(double y, const MixtureParams& params);

/// n mixture draws: a uniform picks the component through the cumulative-pi
/// brackets, then one normal draw from that component.
std::vector<double> mixture_sample(const MixtureParams& params, std::size_t n,
                                   Rng& rng);

}  // namespace varcast::stats
