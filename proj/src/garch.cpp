#include "varcast/garch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>

#include "varcast/distributions.hpp"
#include "varcast/errors.hpp"

namespace varcast::models {

namespace {

constexpr double kLogTwoPi = 1.8378770664093453;
constexpr double kInf = std::numeric_limits<double>::infinity();

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

double sample_variance(const std::vector<double>& x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size());
}

// ---------------------------------------------------------------------------
// Nelder-Mead simplex minimizer; small and deterministic, good enough for a
// 3-4 parameter likelihood.
// ---------------------------------------------------------------------------
struct SimplexResult {
  std::vector<double> x;
  double fx = kInf;
  bool converged = false;
};

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, double step,
                          std::size_t max_iter) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
  for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);

  auto order = [&] {
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = i; j > 0 && fv[j] < fv[j - 1]; --j) {
        std::swap(fv[j], fv[j - 1]);
        std::swap(pts[j], pts[j - 1]);
      }
    }
  };
  order();

  SimplexResult out;
  for (std::size_t it = 0; it < max_iter; ++it) {
    if (std::isfinite(fv[0]) &&
        std::fabs(fv[n] - fv[0]) < 1e-10 * (1.0 + std::fabs(fv[0]))) {
      out.converged = true;
      break;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    auto blend = [&](double coef) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j) {
        p[j] = centroid[j] + coef * (pts[n][j] - centroid[j]);
      }
      return p;
    };

    std::vector<double> refl = blend(-1.0);
    double f_refl = f(refl);
    if (f_refl < fv[0]) {
      std::vector<double> expa = blend(-2.0);
      double f_expa = f(expa);
      if (f_expa < f_refl) {
        pts[n] = std::move(expa);
        fv[n] = f_expa;
      } else {
        pts[n] = std::move(refl);
        fv[n] = f_refl;
      }
    } else if (f_refl < fv[n - 1]) {
      pts[n] = std::move(refl);
      fv[n] = f_refl;
    } else {
      std::vector<double> contr = blend(f_refl < fv[n] ? -0.5 : 0.5);
      double f_contr = f(contr);
      if (f_contr < std::min(f_refl, fv[n])) {
        pts[n] = std::move(contr);
        fv[n] = f_contr;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
          }
          fv[i] = f(pts[i]);
        }
      }
    }
    order();
  }
  out.x = pts[0];
  out.fx = fv[0];
  return out;
}

// ---------------------------------------------------------------------------
// Likelihood machinery.
// ---------------------------------------------------------------------------

// Unconstrained parameterization: t0 = log alpha0, t1 = logit of the
// persistence alpha1+beta1, t2 = logit of the ARCH share alpha1/(alpha1+beta1),
// t3 (GED only) maps nu into [0.5, 5].
GarchParams decode(const std::vector<double>& t, Innovation innovation) {
  GarchParams p;
  p.innovation = innovation;
  p.alpha0 = std::exp(t[0]);
  double s = sigmoid(t[1]) * (1.0 - 1e-9);
  double w = sigmoid(t[2]);
  p.alpha1 = s * w;
  p.beta1 = s * (1.0 - w);
  if (innovation == Innovation::kGed) p.nu = 0.5 + 4.5 * sigmoid(t[3]);
  return p;
}

double loglik_impl(const std::vector<double>& returns, const GarchParams& p,
                   std::vector<double>* cond_var_out,
                   double* one_step_var_out) {
  const std::size_t n = returns.size();
  double s2 = sample_variance(returns);
  double ll = 0.0;
  const bool ged = p.innovation == Innovation::kGed;
  stats::GedShape shape(ged ? p.nu : 2.0);
  if (cond_var_out) cond_var_out->resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) {
      s2 = p.alpha0 + p.alpha1 * returns[t - 1] * returns[t - 1] +
           p.beta1 * s2;
    }
    if (!(s2 > 0.0) || !std::isfinite(s2)) return -kInf;
    if (cond_var_out) (*cond_var_out)[t] = s2;
    double sd = std::sqrt(s2);
    if (ged) {
      ll += stats::ged_logpdf(returns[t] / sd, shape) - std::log(sd);
    } else {
      double z = returns[t] / sd;
      ll += -0.5 * (kLogTwoPi + z * z) - std::log(sd);
    }
  }
  if (one_step_var_out) {
    *one_step_var_out =
        p.alpha0 + p.alpha1 * returns[n - 1] * returns[n - 1] + p.beta1 * s2;
  }
  return ll;
}

}  // namespace

const char* innovation_name(Innovation innovation) {
  return innovation == Innovation::kNormal ? "normal" : "ged";
}

double GarchParams::unconditional_variance() const {
  validate();
  return alpha0 / (1.0 - alpha1 - beta1);
}

void GarchParams::validate() const {
  if (!(alpha0 > 0.0)) throw NumericError("GarchParams: alpha0 must be > 0");
  if (alpha1 < 0.0 || beta1 < 0.0) {
    throw NumericError("GarchParams: alpha1 and beta1 must be nonnegative");
  }
  if (!(alpha1 + beta1 < 1.0)) {
    throw NumericError("GarchParams: nonstationary, alpha1 + beta1 = " +
                       std::to_string(alpha1 + beta1));
  }
  if (!(nu > 0.0)) throw NumericError("GarchParams: nu must be positive");
}

double garch_loglik(const std::vector<double>& returns,
                    const GarchParams& params) {
  if (returns.empty()) throw DataError("garch_loglik: empty window");
  return loglik_impl(returns, params, nullptr, nullptr);
}

GarchFit fit_garch11(const std::vector<double>& returns,
                     Innovation innovation) {
  if (returns.size() < 50) {
    throw DataError("fit_garch11: need at least 50 returns, have " +
                    std::to_string(returns.size()));
  }
  const double var = sample_variance(returns);
  const auto [lo, hi] = std::minmax_element(returns.begin(), returns.end());
  if (!(var > 0.0) || *lo == *hi) {
    throw NumericError("fit_garch11: degenerate window (zero variance)");
  }

  const bool ged = innovation == Innovation::kGed;
  const std::size_t dim = ged ? 4 : 3;
  auto objective = [&](const std::vector<double>& t) {
    double ll = loglik_impl(returns, decode(t, innovation), nullptr, nullptr);
    return std::isfinite(ll) ? -ll : kInf;
  };

  // Deterministic multi-starts spanning high and low persistence.
  const double starts[][2] = {
      {0.90, 1.0 / 9.0}, {0.95, 0.0526}, {0.50, 0.20},
      {0.98, 0.05},      {0.10, 0.50},
  };
  SimplexResult best;
  for (const auto& s : starts) {
    std::vector<double> t0 = {std::log(var * (1.0 - s[0])), logit(s[0]),
                              logit(s[1])};
    if (ged) t0.push_back(logit((1.5 - 0.5) / 4.5));
    SimplexResult r = nelder_mead(objective, std::move(t0), 0.5, 400 * dim);
    if (r.fx < best.fx) best = std::move(r);
  }
  if (!std::isfinite(best.fx)) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "fit_garch11(%s): no start converged to a finite "
                  "likelihood (window var %.3e, best objective %.3e)",
                  innovation_name(innovation), var, best.fx);
    throw NumericError(buf);
  }

  GarchFit fit;
  fit.params = decode(best.x, innovation);
  fit.residuals = returns;
  fit.loglik =
      loglik_impl(returns, fit.params, &fit.cond_var, &fit.one_step_var);
  fit.n_params = ged ? 4 : 3;
  fit.aic = -2.0 * fit.loglik + 2.0 * fit.n_params;
  return fit;
}

double garch_aic(const GarchFit& fit) {
  return -2.0 * fit.loglik + 2.0 * fit.n_params;
}

InnovationChoice select_innovation(const std::vector<double>& returns) {
  InnovationChoice choice;
  bool have_normal = false, have_ged = false;
  GarchFit normal_fit, ged_fit;
  try {
    normal_fit = fit_garch11(returns, Innovation::kNormal);
    have_normal = true;
  } catch (const NumericError&) {
  }
  try {
    ged_fit = fit_garch11(returns, Innovation::kGed);
    have_ged = true;
  } catch (const NumericError&) {
  }
  if (!have_normal && !have_ged) {
    throw NumericError("select_innovation: both candidate fits failed");
  }
  choice.aic_normal = have_normal ? normal_fit.aic : kInf;
  choice.aic_ged = have_ged ? ged_fit.aic : kInf;
  choice.nu = have_ged ? ged_fit.params.nu : 2.0;
  // Ties break to Normal: fewer parameters.
  choice.innovation = choice.aic_ged < choice.aic_normal ? Innovation::kGed
                                                         : Innovation::kNormal;
  return choice;
}

double garch_forecast_variance(const GarchFit& fit, int k_steps) {
  if (k_steps < 1) throw NumericError("garch_forecast_variance: k >= 1");
  fit.params.validate();  // rejects nonstationary parameters
  const double uncond = fit.params.unconditional_variance();
  return uncond + std::pow(fit.params.persistence(), k_steps - 1) *
                      (fit.one_step_var - uncond);
}

series::ReturnSeries garch_simulate(const GarchParams& params,
                                    std::size_t length, stats::Rng& rng) {
  params.validate();
  if (length == 0) throw DataError("garch_simulate: length must be >= 1");

  stats::GedShape shape(params.innovation == Innovation::kGed ? params.nu
                                                              : 2.0);
  series::ReturnSeries out;
  out.dates.reserve(length);
  out.returns.reserve(length);
  out.losses.reserve(length);
  double s2 = params.unconditional_variance();
  double prev_eps = 0.0;
  for (std::size_t t = 0; t < length; ++t) {
    if (t > 0) s2 = params.alpha0 + params.alpha1 * prev_eps * prev_eps +
                    params.beta1 * s2;
    double eta = params.innovation == Innovation::kGed
                     ? stats::ged_sample(shape, rng)
                     : rng.next_normal();
    double eps = std::sqrt(s2) * eta;
    prev_eps = eps;

    // Synthetic strictly increasing labels on a 30-day/12-month grid.
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04zu-%02zu-%02zu", 2000 + t / 360,
                  (t / 30) % 12 + 1, t % 30 + 1);
    out.dates.emplace_back(buf);
    out.returns.push_back(eps);
    out.losses.push_back(-eps);
  }
  return out;
}

}  // namespace varcast::models
