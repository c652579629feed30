#pragma once

#include "lart/rng.hpp"

namespace lart {

double std_normal_pdf(double x);
double log_std_normal_pdf(double x);

// Phi(x); throws std::domain_error on non-finite input.
double std_normal_cdf(double x);

// log Phi(x) with an asymptotic tail branch below -8 to avoid underflow.
double log_std_normal_cdf(double x);

// Inverse of Phi on (0,1); throws std::domain_error outside.
double std_normal_quantile(double p);

// Mills-type ratio phi(x)/Phi(x), stable for very negative x.
double normal_hazard(double x);

// Draw from N(mean, sd^2) restricted to (lower, upper); bounds may be
// +-infinity. Inverse-CDF for mild truncation, exponential-proposal rejection
// for one-sided tails beyond 3 sd. Throws std::domain_error on bad arguments,
// std::runtime_error if the rejection loop exceeds its retry budget.
double sample_truncated_normal(RngStream& rng, double mean, double sd,
                               double lower, double upper);

// Analytic mean of the truncated normal above; used by tests and diagnostics.
double truncated_normal_mean(double mean, double sd, double lower, double upper);

}  // namespace lart
