#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "varcast/mixture.hpp"
#include "varcast/nn/network.hpp"
#include "varcast/series.hpp"

namespace varcast::forecast {

struct MonteCarloConfig {
  std::size_t samples = 100000;
  double alpha = 0.99;
  double asset_value = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Monte Carlo VaR from a day-ahead mixture: N simulated returns, negated to
/// losses, and the ceil(alpha N)-th ascending order statistic scaled by the
/// asset value.
double mc_var(const stats::MixtureParams& params,
              const MonteCarloConfig& config, stats::Rng& rng);

struct ForecastPoint {
  series::Date date;
  double value = 0.0;
};

/// One VaR per day of `series` from `test_begin` on, each from the lookback
/// window of strictly prior returns. Day t draws from
/// Rng(config.seed).child(t), t the series index, so the forecast for a day
/// never depends on evaluation order and days can run in parallel (`jobs`
/// worker threads).
std::vector<ForecastPoint> forecast_series(const nn::NetworkParams& model,
                                           const series::ReturnSeries& series,
                                           std::size_t test_begin,
                                           const MonteCarloConfig& config,
                                           unsigned jobs = 1);

}  // namespace varcast::forecast
