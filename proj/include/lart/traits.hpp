#pragma once

#include <array>
#include <vector>

#include "lart/data.hpp"
#include "lart/params.hpp"

namespace lart {

struct TraitEstimate {
  double theta_hat = 0.0;
  double tau_hat = 0.0;
  Eigen::Matrix2d info = Eigen::Matrix2d::Identity();
  double ci_level = 0.95;
  std::array<double, 2> theta_ci{0.0, 0.0};
  std::array<double, 2> tau_ci{0.0, 0.0};
};

// Posterior mode of (theta, tau) for one subject given fixed params, by
// damped Newton on the concave per-subject objective. `items` restricts the
// sums; empty means prior-only (returns the prior mode (0,0)).
std::pair<double, double> map_estimate(const PopulationParams& params,
                                       const Eigen::VectorXi& r_row,
                                       const Eigen::VectorXd& logT_row,
                                       const std::vector<int>& items);

// Asymptotic information matrix at a given theta; response-independent.
Eigen::Matrix2d information_matrix(const PopulationParams& params, double theta,
                                   const std::vector<int>& items);

// Wald intervals from the inverse information.
TraitEstimate confidence_interval(std::pair<double, double> est,
                                  const Eigen::Matrix2d& info, double level);

// map_estimate + information_matrix + confidence_interval in one call.
TraitEstimate score_subject(const PopulationParams& params,
                            const Eigen::VectorXi& r_row,
                            const Eigen::VectorXd& logT_row,
                            const std::vector<int>& items, double level = 0.95);

// Score every subject of a dataset (mask-aware).
std::vector<TraitEstimate> score_dataset(const PopulationParams& params,
                                         const ResponseDataset& data,
                                         double level = 0.95, int threads = 0);

}  // namespace lart
