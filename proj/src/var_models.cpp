#include "varcast/var_models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "varcast/distributions.hpp"
#include "varcast/errors.hpp"
#include "varcast/series.hpp"

namespace varcast::models {

void VaRConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DataError("VaRConfig: alpha must lie in (0,1)");
  }
  if (horizon != 1) {
    throw DataError("VaRConfig: only the 1-day horizon is supported");
  }
  if (window < 2) throw DataError("VaRConfig: window must be >= 2");
  if (!(asset_value > 0.0)) {
    throw DataError("VaRConfig: asset value must be positive");
  }
}

double var_hs(const std::vector<double>& losses, const VaRConfig& config) {
  config.validate();
  if (losses.size() < 2) {
    throw DataError("var_hs: window must hold at least 2 losses");
  }
  const std::size_t t = losses.size();
  // ceil(alpha * T)-th order statistic, 1-based.
  auto rank = static_cast<std::size_t>(
      std::ceil(config.alpha * static_cast<double>(t)));
  rank = std::clamp<std::size_t>(rank, 1, t);
  std::vector<double> sorted = losses;
  std::nth_element(sorted.begin(), sorted.begin() + (rank - 1), sorted.end());
  return sorted[rank - 1] * config.asset_value;
}

double var_cmm(const std::vector<double>& returns, const VaRConfig& config) {
  config.validate();
  if (returns.size() < 2) {
    throw DataError("var_cmm: window must hold at least 2 returns");
  }
  auto stats = series::sample_stats(returns);
  double z = stats::normal_quantile(1.0 - config.alpha);
  return -(stats.mean + z * stats.stddev) * config.asset_value;
}

double garch_var(const GarchFit& fit, const VaRConfig& config) {
  config.validate();
  if (!(fit.one_step_var > 0.0)) {
    throw NumericError("garch_var: one-step conditional variance must be "
                       "positive");
  }
  double q;
  if (fit.params.innovation == Innovation::kGed) {
    stats::GedShape shape(fit.params.nu);
    q = stats::ged_quantile(1.0 - config.alpha, shape);
  } else {
    q = stats::normal_quantile(1.0 - config.alpha);
  }
  return -(std::sqrt(fit.one_step_var) * q) * config.asset_value;
}

}  // namespace varcast::models
