#pragma once

#include <Eigen/Dense>
#include <vector>

namespace lart {

enum class ModelMode { lart, irt };

// Population parameters: per-item (a, b, omega, phi, lambda) and the latent
// correlation rho. In irt mode the CoT block holds sentinels
// (omega = 0, phi = 0, lambda = 1) and rho = 0.
struct PopulationParams {
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd omega;
  Eigen::VectorXd phi;
  Eigen::VectorXd lambda;
  double rho = 0.0;
  ModelMode mode = ModelMode::lart;

  int n_items() const { return static_cast<int>(a.size()); }
  static PopulationParams zeros(int j);
};

// Throws std::domain_error on invalid parameters (lambda <= 0, |rho| >= 1,
// inconsistent lengths, non-finite entries).
void check_params(const PopulationParams& p);

struct LatentTraits {
  Eigen::VectorXd theta;
  Eigen::VectorXd tau;
  std::vector<Eigen::Matrix2d> info;  // optional, empty or size N

  int n_subjects() const { return static_cast<int>(theta.size()); }
};

}  // namespace lart
