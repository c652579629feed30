#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lart/data.hpp"
#include "lart/params.hpp"

namespace lart {

enum class StepSchedule {
  decay,    // alpha_t = 1/t from the first iteration
  burn_in,  // alpha_t = 1 for the first `burn_in_steps`, then 1/(t - burn_in_steps)
};

struct FitConfig {
  int max_iters = 500;
  int mc_samples = 1;
  StepSchedule schedule = StepSchedule::decay;
  int burn_in_steps = 20;
  double tol = 1e-4;
  std::uint64_t seed = 0;
  ModelMode mode = ModelMode::lart;
  int threads = 0;  // 0 = LART_THREADS env or hardware default
};

// Robbins-Monro-averaged complete-data sufficient statistics.
struct SaSufficientStats {
  int n = 0;
  double s_theta = 0, s_theta2 = 0;
  double s_tau = 0, s_tau2 = 0, s_theta_tau = 0;
  Eigen::VectorXd s_z, s_z_theta;   // per item, SA-averaged
  Eigen::VectorXd s_logt_tau;       // per item, SA-averaged
  Eigen::VectorXd s_logt, s_logt2;  // per item, fixed by the data

  void init(int n_subjects, int n_items);
  // new = (1 - alpha) * old + alpha * current, exactly.
  void blend(const SaSufficientStats& current, double alpha);
};

struct FitTraceEntry {
  int iteration = 0;
  double alpha = 0;
  double param_norm = 0;
  double objective = 0;
};

struct FitResult {
  PopulationParams params;
  LatentTraits last_traits;  // latent draws from the final iteration
  std::vector<FitTraceEntry> trace;
  bool converged = false;
  int iters_run = 0;
  int degenerate_msteps = 0;
};

FitResult saem_fit(const ResponseDataset& data,
                   std::pair<PopulationParams, LatentTraits> init,
                   const FitConfig& cfg);

// Accuracy-only baseline: CoT block and rho frozen at sentinels, T ignored.
FitResult fit_irt_baseline(const ResponseDataset& data,
                           std::pair<PopulationParams, LatentTraits> init,
                           const FitConfig& cfg);

// Closed-form per-block maximizers of the averaged complete-data objective.
std::pair<double, double> m_step_item_accuracy(const SaSufficientStats& stats, int j);
struct CotParams { double omega, phi, lambda; };
CotParams m_step_item_cot(const SaSufficientStats& stats, int j);
double m_step_rho(const SaSufficientStats& stats, int n);

// Averaged complete-data objective (up to param-free constants); the
// per-block M-steps above are its exact maximizers.
double q_objective(const SaSufficientStats& stats, const PopulationParams& params);

// Enforce positive loading sums (flipping traits and rho coherently); leaves
// the likelihood value unchanged.
void orientation_fix(PopulationParams& params, LatentTraits& traits);

int resolve_threads(int requested);

}  // namespace lart
