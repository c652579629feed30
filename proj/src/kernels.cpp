#include "lart/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lart {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kLogSqrt2Pi = 0.9189385332046727;  // log(sqrt(2*pi))

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s ^= stream_id * 0xda942042e4dd58b5ULL + 0x2545f4914f6cdd1dULL;
  std::uint64_t b = splitmix64(s);
  gen_.seed(a ^ (b + 0x9e3779b97f4a7c15ULL));
}

std::uint64_t RngStream::next_u64() { return gen_(); }

double RngStream::uniform() {
  // 53-bit mantissa, shifted into the open interval.
  double u = (gen_() >> 11) * 0x1.0p-53;
  return (u + 0x1.0p-54);
}

double RngStream::normal() { return std_normal_quantile(uniform()); }

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x - kLogSqrt2Pi);
}

double log_std_normal_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

double std_normal_cdf(double x) {
  if (!std::isfinite(x)) throw std::domain_error("std_normal_cdf: non-finite input");
  return 0.5 * std::erfc(-x / kSqrt2);
}

double log_std_normal_cdf(double x) {
  if (!std::isfinite(x)) throw std::domain_error("log_std_normal_cdf: non-finite input");
  if (x < -8.0) {
    // Asymptotic expansion of the Mills ratio: Phi(x) ~ phi(x)/(-x) * (1 - 1/x^2 + 3/x^4 - ...)
    double x2 = x * x;
    double corr = -1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2) +
                  105.0 / (x2 * x2 * x2 * x2);
    return log_std_normal_pdf(x) - std::log(-x) + std::log1p(corr);
  }
  if (x > 8.0) {
    // log(1 - Phi(-x)) with Phi(-x) tiny.
    return std::log1p(-std_normal_cdf(-x));
  }
  return std::log(0.5 * std::erfc(-x / kSqrt2));
}

double normal_hazard(double x) {
  if (x > -8.0) return std_normal_pdf(x) / std_normal_cdf(x);
  return std::exp(log_std_normal_pdf(x) - log_std_normal_cdf(x));
}

// Wichura's AS241 algorithm (PPND16), accurate to ~1e-16 relative.
double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("std_normal_quantile: p must lie in (0,1)");
  const double q = p - 0.5;
  double r;
  if (std::fabs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
              3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
            4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
            2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
            5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -val : val;
}

namespace {

// One-sided lower truncation of the standard normal at alpha >= 3:
// Robert's exponential-proposal rejection sampler.
double sample_tail_standard(RngStream& rng, double alpha) {
  const double a = 0.5 * (alpha + std::sqrt(alpha * alpha + 4.0));
  for (int tries = 0; tries < 10000; ++tries) {
    const double u = rng.uniform();
    const double x = alpha - std::log(u) / a;
    const double d = x - a;
    if (std::log(rng.uniform()) <= -0.5 * d * d) return x;
  }
  throw std::runtime_error("sample_truncated_normal: tail rejection exceeded retry budget");
}

}  // namespace

double sample_truncated_normal(RngStream& rng, double mean, double sd,
                               double lower, double upper) {
  if (!(sd > 0.0)) throw std::domain_error("sample_truncated_normal: sd must be > 0");
  if (!(lower < upper)) throw std::domain_error("sample_truncated_normal: lower >= upper");
  const double lo = (lower - mean) / sd;
  const double hi = (upper - mean) / sd;

  double z;
  if (lo >= 3.0 && hi == std::numeric_limits<double>::infinity()) {
    z = sample_tail_standard(rng, lo);
  } else if (hi <= -3.0 && lo == -std::numeric_limits<double>::infinity()) {
    z = -sample_tail_standard(rng, -hi);
  } else {
    const double plo = (lo == -std::numeric_limits<double>::infinity()) ? 0.0 : std_normal_cdf(lo);
    const double phi = (hi == std::numeric_limits<double>::infinity()) ? 1.0 : std_normal_cdf(hi);
    if (!(phi > plo)) {
      // Both bounds deep in the same tail; fall back to rejection from the
      // nearer bound to avoid quantile saturation.
      if (lo > 0.0) {
        for (int tries = 0;; ++tries) {
          if (tries >= 10000)
            throw std::runtime_error("sample_truncated_normal: interval rejection exhausted");
          double x = sample_tail_standard(rng, lo);
          if (x < hi) { z = x; break; }
        }
      } else {
        for (int tries = 0;; ++tries) {
          if (tries >= 10000)
            throw std::runtime_error("sample_truncated_normal: interval rejection exhausted");
          double x = -sample_tail_standard(rng, -hi);
          if (x > lo) { z = x; break; }
        }
      }
    } else {
      const double u = plo + (phi - plo) * rng.uniform();
      z = std_normal_quantile(u);
      if (z < lo) z = lo;
      if (z > hi) z = hi;
    }
  }
  return mean + sd * z;
}

double truncated_normal_mean(double mean, double sd, double lower, double upper) {
  if (!(sd > 0.0)) throw std::domain_error("truncated_normal_mean: sd must be > 0");
  if (!(lower < upper)) throw std::domain_error("truncated_normal_mean: lower >= upper");
  const double lo = (lower - mean) / sd;
  const double hi = (upper - mean) / sd;
  const bool lo_inf = (lo == -std::numeric_limits<double>::infinity());
  const bool hi_inf = (hi == std::numeric_limits<double>::infinity());
  if (lo_inf && hi_inf) return mean;
  if (hi_inf) {
    // E[Z | Z > lo] = phi(lo)/(1-Phi(lo)) = hazard(-lo) mirrored.
    return mean + sd * normal_hazard(-lo) * 1.0;
  }
  if (lo_inf) {
    return mean - sd * normal_hazard(hi);
  }
  // Two-sided: (phi(lo)-phi(hi)) / (Phi(hi)-Phi(lo)), in log space if needed.
  const double num = std_normal_pdf(lo) - std_normal_pdf(hi);
  const double den = std_normal_cdf(hi) - std_normal_cdf(lo);
  if (den > 1e-300) return mean + sd * num / den;
  throw std::runtime_error("truncated_normal_mean: interval mass underflow");
}

}  // namespace lart
