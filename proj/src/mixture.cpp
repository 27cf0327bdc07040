#include "varcast/mixture.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "varcast/errors.hpp"

namespace varcast::stats {

namespace {
constexpr double kLogTwoPi = 1.8378770664093453;
}

void MixtureParams::validate() const {
  const std::size_t k = pi.size();
  if (k == 0 || mu.size() != k || sigma.size() != k) {
    throw NumericError("MixtureParams: component vectors must be non-empty "
                       "and equally sized");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!(pi[i] >= 0.0 && pi[i] <= 1.0) || !std::isfinite(mu[i])) {
      throw NumericError("MixtureParams: invalid pi or mu at component " +
                         std::to_string(i));
    }
    if (!(sigma[i] > 0.0)) {
      throw NumericError("MixtureParams: sigma must be positive at component " +
                         std::to_string(i));
    }
    sum += pi[i];
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw NumericError("MixtureParams: pi sums to " + std::to_string(sum));
  }
}

double mixture_logpdf(double y, const MixtureParams& params) {
  params.validate();
  const std::size_t k = params.components();
  double max_term = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(k);
  for (std::size_t i = 0; i < k; ++i) {
    double z = (y - params.mu[i]) / params.sigma[i];
    double log_component =
        -0.5 * (kLogTwoPi + z * z) - std::log(params.sigma[i]);
    terms[i] = (params.pi[i] > 0.0)
                   ? std::log(params.pi[i]) + log_component
                   : -std::numeric_limits<double>::infinity();
    max_term = std::max(max_term, terms[i]);
  }
  if (!std::isfinite(max_term)) return max_term;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - max_term);
  return max_term + std::log(acc);
}

std::vector<double> mixture_sample(const MixtureParams& params, std::size_t n,
                                   Rng& rng) {
  params.validate();
  const std::size_t k = params.components();
  std::vector<double> cum(k);
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    acc += params.pi[i];
    cum[i] = acc;
  }
  cum[k - 1] = 1.0;  // guard the last bracket against rounding

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = rng.next_double();
    std::size_t comp = 0;
    while (comp + 1 < k && u >= cum[comp]) ++comp;
    out[i] = params.mu[comp] + params.sigma[comp] * rng.next_normal();
  }
  return out;
}

}  // namespace varcast::stats
