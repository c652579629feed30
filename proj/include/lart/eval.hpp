#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lart/data.hpp"
#include "lart/params.hpp"
#include "lart/saem.hpp"

namespace lart {

struct ParamLaw {
  enum class Kind { uniform, normal };
  Kind kind = Kind::uniform;
  double p1 = 0.0;  // uniform: lower;  normal: mean
  double p2 = 1.0;  // uniform: upper;  normal: variance
};

struct SimConfig {
  int n_subjects = 500;
  int n_items = 50;
  double rho_true = -0.8;
  std::uint64_t seed = 0;
  ParamLaw law_a{ParamLaw::Kind::uniform, 0.5, 1.0};
  ParamLaw law_b{ParamLaw::Kind::normal, 0.0, 0.5};
  ParamLaw law_omega{ParamLaw::Kind::normal, 0.0, 1.0};
  ParamLaw law_phi{ParamLaw::Kind::uniform, 0.5, 1.5};
  ParamLaw law_lambda{ParamLaw::Kind::uniform, 0.5, 2.0};
  int n_replications = 50;
};

struct SyntheticTruth {
  PopulationParams params;
  LatentTraits traits;
};

std::pair<ResponseDataset, SyntheticTruth> gen_synthetic(const SimConfig& cfg);

struct RmseReport {
  double a = 0, b = 0, omega = 0, phi = 0, lambda = 0;
  double theta = 0, tau = 0;
  double rho_abs_err = 0;
  double theta_kendall = 0;  // supplementary rank agreement
};

// Entrywise RMSE between truth and fit; both sides must already be in the
// canonical orientation.
RmseReport rmse_report(const PopulationParams& truth_params,
                       const LatentTraits& truth_traits,
                       const PopulationParams& fitted_params,
                       const LatentTraits& fitted_traits);

struct PredictiveReport {
  std::vector<double> fold_mae_lart, fold_mae_irt;
  double avg_mae_lart = 0, avg_mae_irt = 0;
};

PredictiveReport predictive_power(const ResponseDataset& data, int n_folds,
                                  std::uint64_t split_seed,
                                  const FitConfig& base_cfg);

struct EfficiencyCurve {
  std::vector<int> budgets;
  std::vector<double> dist_lart, dist_irt;  // ||theta_b - theta_full|| / sqrt(N)
};

EfficiencyCurve item_efficiency_curve(const ResponseDataset& data,
                                      const PopulationParams& lart_params,
                                      const PopulationParams& irt_params,
                                      int init_items, int budget);

struct ValidityReport {
  double total_var_lart = 0, total_var_irt = 0;
};

ValidityReport validity_variance(const ResponseDataset& data, int n_splits,
                                 std::uint64_t split_seed,
                                 const FitConfig& base_cfg);

struct LlmEfficiencyReport {
  std::vector<int> sizes;
  std::vector<double> dist_a_lart, dist_b_lart;
  std::vector<double> dist_a_irt, dist_b_irt;
  double max_abs_b_lart = 0, max_abs_b_irt = 0;  // at the smallest size
};

LlmEfficiencyReport llm_efficiency(const ResponseDataset& data,
                                   const std::vector<int>& sizes,
                                   std::uint64_t perm_seed,
                                   const FitConfig& base_cfg);

struct InitComparisonReport {
  std::vector<RmseReport> spectral;  // one per replication
  std::vector<RmseReport> burn_in;
};

InitComparisonReport init_comparison(const SimConfig& sim_cfg,
                                     const FitConfig& base_cfg);

// Convenience: fit (spectral init + SAEM) in the requested mode.
FitResult fit_dataset(const ResponseDataset& data, const FitConfig& cfg);

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace lart
