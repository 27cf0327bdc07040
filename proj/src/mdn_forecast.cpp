#include "varcast/mdn_forecast.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "varcast/errors.hpp"

namespace varcast::forecast {

void MonteCarloConfig::validate() const {
  if (samples < 1000) {
    throw DataError("MonteCarloConfig: need at least 1000 samples");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DataError("MonteCarloConfig: alpha must lie in (0,1)");
  }
  if (!(asset_value > 0.0)) {
    throw DataError("MonteCarloConfig: asset value must be positive");
  }
}

double mc_var(const stats::MixtureParams& params,
              const MonteCarloConfig& config, stats::Rng& rng) {
  config.validate();
  std::vector<double> losses = stats::mixture_sample(params, config.samples,
                                                     rng);
  for (double& v : losses) v = -v;
  auto rank = static_cast<std::size_t>(
      std::ceil(config.alpha * static_cast<double>(config.samples)));
  rank = std::clamp<std::size_t>(rank, 1, losses.size());
  std::nth_element(losses.begin(), losses.begin() + (rank - 1), losses.end());
  return losses[rank - 1] * config.asset_value;
}

std::vector<ForecastPoint> forecast_series(const nn::NetworkParams& model,
                                           const series::ReturnSeries& series,
                                           std::size_t test_begin,
                                           const MonteCarloConfig& config,
                                           unsigned jobs) {
  config.validate();
  const std::size_t d = model.config.lookback;
  if (test_begin >= series.size()) {
    throw DataError("forecast_series: test range is empty");
  }
  if (test_begin < d) {
    throw DataError("forecast_series: insufficient history, need " +
                    std::to_string(d) + " returns before " +
                    series.dates[test_begin]);
  }

  const std::size_t n = series.size() - test_begin;
  std::vector<ForecastPoint> out(n);
  stats::Rng master(config.seed);

  auto run_day = [&](std::size_t i) {
    const std::size_t t = test_begin + i;
    std::vector<double> window(series.returns.begin() + (t - d),
                               series.returns.begin() + t);
    auto mixture = forward(window, model);
    stats::Rng day_rng = master.child(t);
    out[i] = {series.dates[t], mc_var(mixture, config, day_rng)};
  };

  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) run_day(i);
  } else {
    std::vector<std::thread> workers;
    const unsigned n_workers = std::min<unsigned>(jobs, n);
    for (unsigned w = 0; w < n_workers; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += n_workers) run_day(i);
      });
    }
    for (auto& t : workers) t.join();
  }
  return out;
}

}  // namespace varcast::forecast
