#pragma once

#include <vector>

#include "lart/kernels.hpp"
#include "lart/params.hpp"

namespace lart {

// Per-subject posterior ingredients for (theta, tau) given data and params.
// mu_tau(theta) = mu_tau_c1 * theta + mu_tau_c0.
struct PosteriorFactors {
  double mu_theta = 0.0;
  double sigma_theta = 1.0;  // sd
  double mu_tau_c1 = 0.0;
  double mu_tau_c0 = 0.0;
  double sigma_tau = 1.0;  // sd
  std::vector<int> items;  // observed item indices (defines alignment below)
  Eigen::VectorXd d1;      // (2R-1) * a, per observed item
  Eigen::VectorXd d2;      // (2R-1) * b
  Eigen::VectorXd s_diag;  // sqrt(sigma_theta^2 d1^2 + 1)
};

PosteriorFactors posterior_factors(const PopulationParams& params,
                                   const Eigen::VectorXi& r_row,
                                   const Eigen::VectorXd& logT_row,
                                   const std::vector<int>& items);

// Exact sampler for the skewed 1-D posterior of theta. Construction
// precomputes the inverse-CDF grid for the shared scalar mixing variable, so
// repeated draws from the same factors are cheap.
class ThetaSampler {
public:
  explicit ThetaSampler(const PosteriorFactors& f);
  double draw(RngStream& rng) const;

private:
  double mu_, sigma_;
  double sd_u0_ = 1.0;
  double denom_ = 1.0;       // 1 + sigma^2 ||d1||^2
  bool degenerate_ = true;   // no active truncation constraints
  std::vector<double> alpha_;  // sigma * d1_j, active items only
  std::vector<double> c_;      // -(d1_j mu + d2_j), active items only
  std::vector<double> d1_act_;
  // inverse-CDF grid for the mixing variable V
  double grid_lo_ = 0.0, grid_step_ = 0.0;
  std::vector<double> dens_;
  std::vector<double> cdf_;
};

// Convenience single draw (builds the grid each call).
double sample_theta(RngStream& rng, const PosteriorFactors& f);

// tau | theta, data ~ N(c1*theta + c0, sigma_tau^2).
double sample_tau_given_theta(RngStream& rng, const PosteriorFactors& f,
                              double theta);

// Latent probit utilities Z_j ~ N(a_j theta + b_j, 1) truncated to the side
// selected by R_j; returned aligned with `items`.
Eigen::VectorXd sample_probit_augmentation(RngStream& rng,
                                           const PopulationParams& params,
                                           double theta,
                                           const Eigen::VectorXi& r_row,
                                           const std::vector<int>& items);

// Deterministic quadrature of the 1-D theta posterior, used as an oracle.
struct GridPosterior {
  Eigen::VectorXd grid;
  Eigen::VectorXd weights;  // normalized, sum to 1
  double mean = 0.0;
  double sd = 0.0;
  double quantile(double p) const;

  Eigen::VectorXd cdf;  // cumulative weights
};

GridPosterior oracle_theta_grid(const PopulationParams& params,
                                const Eigen::VectorXi& r_row,
                                const Eigen::VectorXd& logT_row,
                                const std::vector<int>& items, int n_grid);

std::vector<int> all_items(int j);

}  // namespace lart
