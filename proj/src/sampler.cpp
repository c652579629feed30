#include "lart/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lart {

namespace {

constexpr int kFineGrid = 1024;
constexpr int kCoarseGrid = 129;
constexpr double kHalfWidthSd = 10.0;

// Cubic-Hermite table for log Phi on [-8.5, 8.5]; accurate to ~1e-11 and much
// faster than erfc in the hot grid-construction loop.
struct LogPhiTable {
  static constexpr double lo = -8.5, hi = 8.5;
  static constexpr int n = 1089;  // step 1/64
  double step = 0.0, inv_step = 0.0;
  double val[n];
  double der[n];
  LogPhiTable() {
    step = (hi - lo) / (n - 1);
    inv_step = 1.0 / step;
    for (int i = 0; i < n; ++i) {
      const double x = lo + i * step;
      val[i] = log_std_normal_cdf(x);
      der[i] = normal_hazard(x);
    }
  }
  double operator()(double x) const {
    if (x <= lo) {
      const double x2 = x * x;
      const double corr = -1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
      return -0.5 * x2 - 0.9189385332046727 - std::log(-x) + std::log1p(corr);
    }
    if (x >= hi) return 0.0;  // |error| < 1e-17 here
    const double u = (x - lo) * inv_step;
    int i = static_cast<int>(u);
    if (i >= n - 1) i = n - 2;
    const double t = u - i;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    return h00 * val[i] + h10 * step * der[i] + h01 * val[i + 1] +
           h11 * step * der[i + 1];
  }
};

const LogPhiTable& log_phi_table() {
  static const LogPhiTable table;
  return table;
}

}  // namespace

std::vector<int> all_items(int j) {
  std::vector<int> v(j);
  for (int k = 0; k < j; ++k) v[k] = k;
  return v;
}

PosteriorFactors posterior_factors(const PopulationParams& params,
                                   const Eigen::VectorXi& r_row,
                                   const Eigen::VectorXd& logT_row,
                                   const std::vector<int>& items) {
  check_params(params);
  PosteriorFactors f;
  f.items = items;
  const double rho = params.rho;
  const double omr2 = 1.0 - rho * rho;

  double sum_phi2_lam = 0.0;
  double s_data = 0.0;  // sum over items of (log T - omega) * phi / lambda
  for (int j : items) {
    sum_phi2_lam += params.phi[j] * params.phi[j] / params.lambda[j];
    s_data += (logT_row[j] - params.omega[j]) * params.phi[j] / params.lambda[j];
  }

  const double sigma_tau2 = 1.0 / (1.0 / omr2 + sum_phi2_lam);
  f.sigma_tau = std::sqrt(sigma_tau2);
  f.mu_tau_c1 = sigma_tau2 * rho / omr2;
  f.mu_tau_c0 = -sigma_tau2 * s_data;

  const double sigma_theta2 =
      1.0 / (1.0 / omr2 - sigma_tau2 * rho * rho / (omr2 * omr2));
  f.sigma_theta = std::sqrt(sigma_theta2);
  f.mu_theta = sigma_theta2 * (-s_data) * sigma_tau2 * rho / omr2;

  const int m = static_cast<int>(items.size());
  f.d1.resize(m);
  f.d2.resize(m);
  f.s_diag.resize(m);
  for (int k = 0; k < m; ++k) {
    const int j = items[k];
    const double sgn = 2.0 * r_row[j] - 1.0;
    f.d1[k] = sgn * params.a[j];
    f.d2[k] = sgn * params.b[j];
    f.s_diag[k] = std::sqrt(sigma_theta2 * f.d1[k] * f.d1[k] + 1.0);
  }
  return f;
}

ThetaSampler::ThetaSampler(const PosteriorFactors& f)
    : mu_(f.mu_theta), sigma_(f.sigma_theta) {
  const int m = static_cast<int>(f.d1.size());
  double d1_norm2 = 0.0;
  for (int k = 0; k < m; ++k) {
    if (f.d1[k] == 0.0) continue;
    alpha_.push_back(sigma_ * f.d1[k]);
    c_.push_back(-(f.d1[k] * mu_ + f.d2[k]));
    d1_act_.push_back(f.d1[k]);
    d1_norm2 += f.d1[k] * f.d1[k];
  }
  denom_ = 1.0 + sigma_ * sigma_ * d1_norm2;
  sd_u0_ = 1.0 / std::sqrt(denom_);
  degenerate_ = alpha_.empty();
  if (degenerate_) return;

  const auto& lp = log_phi_table();
  const int na = static_cast<int>(alpha_.size());

  // Unnormalized log density of the mixing variable:
  //   g(v) = -v^2/2 + sum_j log Phi(alpha_j v - c_j).
  auto gprime = [&](double v, double* gpp) {
    double gp = -v, hsum = 0.0;
    for (int k = 0; k < na; ++k) {
      const double x = alpha_[k] * v - c_[k];
      const double h = normal_hazard(x);
      gp += alpha_[k] * h;
      hsum += alpha_[k] * alpha_[k] * h * (x + h);
    }
    *gpp = -1.0 - hsum;
    return gp;
  };

  // Newton search for the mode (g is strictly concave).
  double v = 0.0, gpp = -1.0;
  for (int it = 0; it < 80; ++it) {
    const double gp = gprime(v, &gpp);
    const double step = gp / gpp;
    v -= step;
    if (std::fabs(step) < 1e-11) break;
  }
  gprime(v, &gpp);
  const double sd_lap = 1.0 / std::sqrt(-gpp);
  grid_lo_ = v - kHalfWidthSd * sd_lap;
  const double grid_hi = v + kHalfWidthSd * sd_lap;
  grid_step_ = (grid_hi - grid_lo_) / (kFineGrid - 1);

  // The log-Phi sum is smooth in v: evaluate it on a coarse grid and
  // interpolate (Catmull-Rom) onto the fine inverse-CDF grid.
  double coarse[kCoarseGrid];
  const double cstep = (grid_hi - grid_lo_) / (kCoarseGrid - 1);
  for (int i = 0; i < kCoarseGrid; ++i) {
    const double vi = grid_lo_ + i * cstep;
    double s = 0.0;
    for (int k = 0; k < na; ++k) s += lp(alpha_[k] * vi - c_[k]);
    coarse[i] = s;
  }

  dens_.resize(kFineGrid);
  cdf_.resize(kFineGrid);
  double gmax = -std::numeric_limits<double>::infinity();
  std::vector<double> logd(kFineGrid);
  for (int i = 0; i < kFineGrid; ++i) {
    const double vi = grid_lo_ + i * grid_step_;
    const double u = (vi - grid_lo_) / cstep;
    int seg = static_cast<int>(u);
    if (seg < 0) seg = 0;
    if (seg > kCoarseGrid - 2) seg = kCoarseGrid - 2;
    const double t = u - seg;
    const double p0 = coarse[std::max(seg - 1, 0)];
    const double p1 = coarse[seg];
    const double p2 = coarse[seg + 1];
    const double p3 = coarse[std::min(seg + 2, kCoarseGrid - 1)];
    const double s =
        p1 + 0.5 * t * (p2 - p0 +
                        t * (2 * p0 - 5 * p1 + 4 * p2 - p3 +
                             t * (3 * (p1 - p2) + p3 - p0)));
    logd[i] = -0.5 * vi * vi + s;
    gmax = std::max(gmax, logd[i]);
  }
  double acc = 0.0;
  double prev = std::exp(logd[0] - gmax);
  dens_[0] = prev;
  cdf_[0] = 0.0;
  for (int i = 1; i < kFineGrid; ++i) {
    const double w = std::exp(logd[i] - gmax);
    dens_[i] = w;
    acc += 0.5 * (prev + w);
    cdf_[i] = acc;
    prev = w;
  }
  if (!(acc > 0.0) || !std::isfinite(acc))
    throw std::runtime_error("ThetaSampler: degenerate mixing density");
}

double ThetaSampler::draw(RngStream& rng) const {
  if (degenerate_) {
    const double u0 = sd_u0_ * rng.normal();
    return mu_ + sigma_ * u0;
  }
  // 1. Mixing variable V by inverse CDF on the precomputed grid.
  const double target = rng.uniform() * cdf_.back();
  const int hi0 =
      static_cast<int>(std::lower_bound(cdf_.begin(), cdf_.end(), target) -
                       cdf_.begin());
  const int seg = std::clamp(hi0 - 1, 0, kFineGrid - 2);
  const double need = target - cdf_[seg];
  const double w0 = dens_[seg], w1 = dens_[seg + 1];
  // Piecewise-linear density on the segment: solve w0*t + (w1-w0)*t^2/2 = need.
  double t;
  const double dw = w1 - w0;
  if (std::fabs(dw) < 1e-14 * (w0 + w1 + 1e-300)) {
    t = (w0 > 0.0) ? need / w0 : 0.5;
  } else {
    const double disc = w0 * w0 + 2.0 * dw * need;
    t = (std::sqrt(std::max(disc, 0.0)) - w0) / dw;
  }
  t = std::clamp(t, 0.0, 1.0);
  const double V = grid_lo_ + (seg + t) * grid_step_;

  // 2. Independent one-sided truncated normals W_j >= c_j - alpha_j V.
  const int na = static_cast<int>(alpha_.size());
  double dot = 0.0;     // d1' W
  double d1_norm2 = 0.0;
  for (int k = 0; k < na; ++k) {
    const double lb = c_[k] - alpha_[k] * V;
    const double w = sample_truncated_normal(
        rng, 0.0, 1.0, lb, std::numeric_limits<double>::infinity());
    dot += d1_act_[k] * w;
    d1_norm2 += d1_act_[k] * d1_act_[k];
  }

  // 3. Combine through the rank-1 identity.
  const double u0 = sd_u0_ * rng.normal();
  const double inner = sigma_ * d1_norm2 * V + dot;  // d1' (sigma d1 V + W)
  return mu_ + sigma_ * (u0 + sigma_ * inner / denom_);
}

double sample_theta(RngStream& rng, const PosteriorFactors& f) {
  return ThetaSampler(f).draw(rng);
}

double sample_tau_given_theta(RngStream& rng, const PosteriorFactors& f,
                              double theta) {
  return f.mu_tau_c1 * theta + f.mu_tau_c0 + f.sigma_tau * rng.normal();
}

Eigen::VectorXd sample_probit_augmentation(RngStream& rng,
                                           const PopulationParams& params,
                                           double theta,
                                           const Eigen::VectorXi& r_row,
                                           const std::vector<int>& items) {
  const int m = static_cast<int>(items.size());
  Eigen::VectorXd z(m);
  const double inf = std::numeric_limits<double>::infinity();
  for (int k = 0; k < m; ++k) {
    const int j = items[k];
    const double mean = params.a[j] * theta + params.b[j];
    if (r_row[j] == 1)
      z[k] = sample_truncated_normal(rng, mean, 1.0, 0.0, inf);
    else
      z[k] = sample_truncated_normal(rng, mean, 1.0, -inf, 0.0);
  }
  return z;
}

double GridPosterior::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("GridPosterior::quantile: p outside (0,1)");
  const int n = static_cast<int>(grid.size());
  const double target = p * cdf[n - 1];
  int hi = static_cast<int>(std::lower_bound(cdf.data(), cdf.data() + n, target) -
                            cdf.data());
  hi = std::clamp(hi, 1, n - 1);
  const double c0 = cdf[hi - 1], c1 = cdf[hi];
  const double t = (c1 > c0) ? (target - c0) / (c1 - c0) : 0.5;
  return grid[hi - 1] + t * (grid[hi] - grid[hi - 1]);
}

GridPosterior oracle_theta_grid(const PopulationParams& params,
                                const Eigen::VectorXi& r_row,
                                const Eigen::VectorXd& logT_row,
                                const std::vector<int>& items, int n_grid) {
  if (n_grid < 512) throw std::domain_error("oracle_theta_grid: n_grid < 512");
  const PosteriorFactors f = posterior_factors(params, r_row, logT_row, items);

  GridPosterior out;
  out.grid.resize(n_grid);
  out.weights.resize(n_grid);
  out.cdf.resize(n_grid);
  const double lo = f.mu_theta - 10.0 * f.sigma_theta;
  const double hi = f.mu_theta + 10.0 * f.sigma_theta;
  const double step = (hi - lo) / (n_grid - 1);

  Eigen::VectorXd logw(n_grid);
  double wmax = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_grid; ++i) {
    const double th = lo + i * step;
    const double z = (th - f.mu_theta) / f.sigma_theta;
    double lw = -0.5 * z * z;
    for (int k = 0; k < static_cast<int>(f.d1.size()); ++k)
      lw += log_std_normal_cdf(f.d1[k] * th + f.d2[k]);
    out.grid[i] = th;
    logw[i] = lw;
    wmax = std::max(wmax, lw);
  }
  double total = 0.0;
  for (int i = 0; i < n_grid; ++i) {
    out.weights[i] = std::exp(logw[i] - wmax);
    total += out.weights[i];
  }
  out.weights /= total;
  double mean = 0.0;
  for (int i = 0; i < n_grid; ++i) mean += out.weights[i] * out.grid[i];
  double var = 0.0;
  for (int i = 0; i < n_grid; ++i) {
    const double d = out.grid[i] - mean;
    var += out.weights[i] * d * d;
  }
  out.mean = mean;
  out.sd = std::sqrt(var);
  double acc = 0.0;
  for (int i = 0; i < n_grid; ++i) {
    acc += out.weights[i];
    out.cdf[i] = acc;
  }
  return out;
}

}  // namespace lart
