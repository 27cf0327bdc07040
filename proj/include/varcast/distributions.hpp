#pragma once

#include "varcast/rng.hpp"

namespace varcast::stats {

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile, absolute error below 1e-9 on (0,1).
/// Throws NumericError outside (0,1).
double normal_quantile(double p);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
/// Series expansion for x < a+1, Lentz continued fraction otherwise.
double gamma_p(double a, double x);

/// Chi-square survival function, dof restricted to 1 or 2.
/// dof 2 is exp(-x/2) in closed form; dof 1 goes through erfc.
double chi2_sf(double x, int dof);

/// Generalized error distribution standardized to zero mean and unit
/// variance:
///   f(x; nu) = nu * exp(-0.5 |x/lambda|^nu) / (lambda * 2^(1+1/nu) * G(1/nu))
///   lambda   = sqrt(2^(-2/nu) * G(1/nu) / G(3/nu))
/// nu = 2 is the standard normal, nu = 1 the unit-variance Laplace.
struct GedShape {
  explicit GedShape(double nu);

  double nu;
  double lambda;    // scale keeping the variance at 1
  double log_norm;  // log of the density normalization constant
};

double ged_logpdf(double x, const GedShape& shape);
double ged_cdf(double x, const GedShape& shape);

/// Inverts ged_cdf by bisection; absolute error below 1e-8.
double ged_quantile(double p, const GedShape& shape);

/// Unit-variance GED draw: sign * lambda * (2G)^(1/nu) with
/// G ~ Gamma(1/nu, 1) sampled by Marsaglia-Tsang.
double ged_sample(const GedShape& shape, Rng& rng);

}  // namespace varcast::stats
