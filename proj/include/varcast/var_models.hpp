#pragma once

#include <cstddef>
#include <vector>

#include "varcast/garch.hpp"

namespace varcast::models {

/// Shared VaR forecasting configuration. Only the one-day horizon is
/// supported; VaR is reported in loss units scaled by the asset value.
struct VaRConfig {
  double alpha = 0.99;
  int horizon = 1;
  std::size_t window = 250;
  double asset_value = 1.0;

  void validate() const;
};

/// Historical simulation: the ceil(alpha * T)-th ascending order statistic of
/// the window's losses, scaled by the asset value.
double var_hs(const std::vector<double>& losses, const VaRConfig& config);

/// Constant-mean model: -(mu + z_{1-alpha} * sigma) * P with the population
/// (1/T) standard deviation. Can come out negative for large positive mu;
/// reported as computed.
double var_cmm(const std::vector<double>& returns, const VaRConfig& config);

/// GARCH VaR off the one-step conditional variance:
/// -(sigma_{t+1} * q_{1-alpha}) * P, q the unit-variance innovation quantile.
double garch_var(const GarchFit& fit, const VaRConfig& config);

}  // namespace varcast::models
