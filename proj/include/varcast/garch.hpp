#pragma once

#include <cstddef>
#include <vector>

#include "varcast/rng.hpp"
#include "varcast/series.hpp"

namespace varcast::models {

enum class Innovation { kNormal, kGed };

const char* innovation_name(Innovation innovation);

/// GARCH(1,1) parameter set with the mean fixed at zero:
///   sigma_t^2 = alpha0 + alpha1 * eps_{t-1}^2 + beta1 * sigma_{t-1}^2
struct GarchParams {
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  double beta1 = 0.0;
  Innovation innovation = Innovation::kNormal;
  double nu = 2.0;  // GED shape, used when innovation == kGed

  double persistence() const { return alpha1 + beta1; }
  double unconditional_variance() const;

  /// alpha0 > 0, alpha1/beta1 >= 0, alpha1 + beta1 < 1, nu > 0.
  void validate() const;
};

struct GarchFit {
  GarchParams params;
  std::vector<double> cond_var;    // sigma_t^2 along the fitted window
  std::vector<double> residuals;   // eps_t (returns, since mu = 0)
  double one_step_var = 0.0;       // sigma^2_{T+1 | T}
  double loglik = 0.0;
  int n_params = 0;
  double aic = 0.0;                // -2 loglik + 2 n_params
};

/// Innovation log-likelihood of `params` on `returns` with sigma_1^2 seeded
/// from the sample variance. Exposed so a stored fit can be re-checked.
double garch_loglik(const std::vector<double>& returns,
                    const GarchParams& params);

/// Maximum-likelihood GARCH(1,1) fit via multi-start Nelder-Mead over an
/// unconstrained reparameterization (log alpha0, logit persistence, logit
/// ARCH share, and logit-bounded nu in [0.5, 5] for GED). Throws
/// NumericError when the window is degenerate or no start converges.
GarchFit fit_garch11(const std::vector<double>& returns,
                     Innovation innovation);

double garch_aic(const GarchFit& fit);

/// Fits both innovation candidates and keeps the lower AIC; ties go to
/// Normal. Both fits are returned for reporting.
struct InnovationChoice {
  Innovation innovation = Innovation::kNormal;
  double nu = 2.0;       // shape of the GED candidate
  double aic_normal = 0.0;
  double aic_ged = 0.0;
};
InnovationChoice select_innovation(const std::vector<double>& returns);

/// k-step variance forecast:
///   sigma^2 + (alpha1+beta1)^(k-1) * (sigma^2_{t+1|t} - sigma^2)
double garch_forecast_variance(const GarchFit& fit, int k_steps);

/// Simulates the recursion eps_t = sigma_t eta_t with unit-variance
/// innovations, sigma_1^2 at the unconditional variance. Dates are synthetic
/// labels; only their ordering matters.
series::ReturnSeries garch_simulate(const GarchParams& params,
                                    std::size_t length, stats::Rng& rng);

}  // namespace varcast::models
