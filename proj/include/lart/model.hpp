#pragma once

#include "lart/data.hpp"
#include "lart/params.hpp"

namespace lart {

// Complete-data log posterior: probit likelihood of R, lognormal likelihood
// of log T, and the bivariate normal prior on (theta, tau). Missing entries
// contribute nothing. In irt mode the CoT terms are dropped and the prior is
// standard normal on theta alone.
double complete_log_posterior(const PopulationParams& params,
                              const LatentTraits& traits,
                              const ResponseDataset& data);

// Closed-form marginal moments implied by the model.
struct MarginalMoments {
  Eigen::VectorXd p_correct;     // P(R_j = 1)
  Eigen::VectorXd mean_log_t;    // E[log T_j]
  Eigen::VectorXd var_log_t;     // Var[log T_j]
  Eigen::MatrixXd accuracy_corr; // latent corr between accuracy utilities
  Eigen::MatrixXd cot_corr;      // corr between log T columns
  Eigen::MatrixXd cross_corr;    // latent corr, accuracy utility j1 vs CoT residual j2
};

MarginalMoments marginal_moments(const PopulationParams& params);

}  // namespace lart
