#include "lart/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lart/cat.hpp"
#include "lart/kernels.hpp"
#include "lart/sampler.hpp"
#include "lart/spectral.hpp"
#include "lart/traits.hpp"

namespace lart {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

double draw_law(RngStream& rng, const ParamLaw& law) {
  if (law.kind == ParamLaw::Kind::uniform)
    return law.p1 + (law.p2 - law.p1) * rng.uniform();
  return law.p1 + std::sqrt(law.p2) * rng.normal();
}

double rmse(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw std::domain_error("rmse: misaligned vectors");
  if (x.size() == 0) return 0.0;
  return std::sqrt((x - y).squaredNorm() / x.size());
}

double kendall_tau(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const int n = static_cast<int>(x.size());
  if (n < 2) return 0.0;
  long long concordant = 0, discordant = 0;
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k) {
      const double s = (x[i] - x[k]) * (y[i] - y[k]);
      if (s > 0) ++concordant;
      else if (s < 0) ++discordant;
    }
  const double total = 0.5 * n * (n - 1);
  return (concordant - discordant) / total;
}

std::vector<int> permutation(int n, RngStream& rng) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const int k = static_cast<int>(rng.uniform() * (i + 1));
    std::swap(p[i], p[std::min(k, i)]);
  }
  return p;
}

ResponseDataset subset_columns(const ResponseDataset& data,
                               const std::vector<int>& cols) {
  ResponseDataset out;
  out.n_subjects = data.n_subjects;
  out.n_items = static_cast<int>(cols.size());
  out.subject_ids = data.subject_ids;
  out.R.resize(out.n_subjects, out.n_items);
  out.T.resize(out.n_subjects, out.n_items);
  for (int c = 0; c < out.n_items; ++c) {
    out.item_ids.push_back(data.item_ids[cols[c]]);
    out.R.col(c) = data.R.col(cols[c]);
    out.T.col(c) = data.T.col(cols[c]);
  }
  return out;
}

ResponseDataset subset_rows(const ResponseDataset& data,
                            const std::vector<int>& rows) {
  ResponseDataset out;
  out.n_subjects = static_cast<int>(rows.size());
  out.n_items = data.n_items;
  out.item_ids = data.item_ids;
  out.R.resize(out.n_subjects, out.n_items);
  out.T.resize(out.n_subjects, out.n_items);
  for (int r = 0; r < out.n_subjects; ++r) {
    out.subject_ids.push_back(data.subject_ids[rows[r]]);
    out.R.row(r) = data.R.row(rows[r]);
    out.T.row(r) = data.T.row(rows[r]);
  }
  return out;
}

Eigen::VectorXd theta_of(const std::vector<TraitEstimate>& est) {
  Eigen::VectorXd v(est.size());
  for (std::size_t i = 0; i < est.size(); ++i) v[i] = est[i].theta_hat;
  return v;
}

}  // namespace

FitResult fit_dataset(const ResponseDataset& data, const FitConfig& cfg) {
  auto init = spectral_initialize(data);
  if (cfg.mode == ModelMode::irt) return fit_irt_baseline(data, std::move(init), cfg);
  return saem_fit(data, std::move(init), cfg);
}

std::pair<ResponseDataset, SyntheticTruth> gen_synthetic(const SimConfig& cfg) {
  if (cfg.n_subjects < 1 || cfg.n_items < 1)
    throw std::domain_error("gen_synthetic: bad dimensions");
  const int n = cfg.n_subjects, j = cfg.n_items;

  SyntheticTruth truth;
  truth.params = PopulationParams::zeros(j);
  RngStream prng(cfg.seed, 0);
  for (int k = 0; k < j; ++k) {
    truth.params.a[k] = draw_law(prng, cfg.law_a);
    truth.params.b[k] = draw_law(prng, cfg.law_b);
    truth.params.omega[k] = draw_law(prng, cfg.law_omega);
    truth.params.phi[k] = draw_law(prng, cfg.law_phi);
    truth.params.lambda[k] = std::max(draw_law(prng, cfg.law_lambda), 1e-6);
  }
  truth.params.rho = cfg.rho_true;
  check_params(truth.params);

  ResponseDataset data;
  data.n_subjects = n;
  data.n_items = j;
  data.R.resize(n, j);
  data.T.resize(n, j);
  for (int i = 0; i < n; ++i) data.subject_ids.push_back("s" + std::to_string(i));
  for (int k = 0; k < j; ++k) data.item_ids.push_back("i" + std::to_string(k));

  truth.traits.theta.resize(n);
  truth.traits.tau.resize(n);
  const double rho = cfg.rho_true;
  const double resid = std::sqrt(1.0 - rho * rho);
  RngStream drng(cfg.seed, 1);
  for (int i = 0; i < n; ++i) {
    const double th = drng.normal();
    const double ta = rho * th + resid * drng.normal();
    truth.traits.theta[i] = th;
    truth.traits.tau[i] = ta;
    for (int k = 0; k < j; ++k) {
      const double p = std_normal_cdf(truth.params.a[k] * th + truth.params.b[k]);
      data.R(i, k) = (drng.uniform() < p) ? 1 : 0;
      const double mu = truth.params.omega[k] - truth.params.phi[k] * ta;
      const double lt = mu + std::sqrt(truth.params.lambda[k]) * drng.normal();
      data.T(i, k) = std::max(1.0, std::round(std::exp(lt)));
    }
  }
  return {std::move(data), std::move(truth)};
}

RmseReport rmse_report(const PopulationParams& tp, const LatentTraits& tt,
                       const PopulationParams& fp, const LatentTraits& ft) {
  RmseReport r;
  r.a = rmse(tp.a, fp.a);
  r.b = rmse(tp.b, fp.b);
  r.omega = rmse(tp.omega, fp.omega);
  r.phi = rmse(tp.phi, fp.phi);
  r.lambda = rmse(tp.lambda, fp.lambda);
  if (tt.theta.size() > 0 && ft.theta.size() > 0) {
    r.theta = rmse(tt.theta, ft.theta);
    r.tau = rmse(tt.tau, ft.tau);
    r.theta_kendall = kendall_tau(tt.theta, ft.theta);
  }
  r.rho_abs_err = std::fabs(tp.rho - fp.rho);
  return r;
}

PredictiveReport predictive_power(const ResponseDataset& data, int n_folds,
                                  std::uint64_t split_seed,
                                  const FitConfig& base_cfg) {
  if (!data.complete()) throw std::domain_error("predictive_power: requires complete data");
  if (data.n_items < n_folds || n_folds < 2)
    throw std::domain_error("predictive_power: bad fold count");

  FitConfig lart_cfg = base_cfg;
  lart_cfg.mode = ModelMode::lart;
  FitConfig irt_cfg = base_cfg;
  irt_cfg.mode = ModelMode::irt;
  const PopulationParams lart_params = fit_dataset(data, lart_cfg).params;
  const PopulationParams irt_params = fit_dataset(data, irt_cfg).params;

  RngStream rng(split_seed, 0);
  const std::vector<int> perm = permutation(data.n_items, rng);

  PredictiveReport report;
  const Eigen::MatrixXd logT = data.log_T();
  for (int f = 0; f < n_folds; ++f) {
    std::vector<int> held_out, held_in;
    for (int k = 0; k < data.n_items; ++k) {
      if (k % n_folds == f) held_out.push_back(perm[k]);
      else held_in.push_back(perm[k]);
    }
    std::sort(held_out.begin(), held_out.end());
    std::sort(held_in.begin(), held_in.end());

    double mae_lart = 0, mae_irt = 0;
    long long count = 0;
    Eigen::VectorXi r_row(data.n_items);
    Eigen::VectorXd l_row(data.n_items);
    for (int i = 0; i < data.n_subjects; ++i) {
      r_row = data.R.row(i);
      l_row = logT.row(i);
      const auto est_l = map_estimate(lart_params, r_row, l_row, held_in);
      const auto est_i = map_estimate(irt_params, r_row, l_row, held_in);
      for (int jj : held_out) {
        const double pl = std_normal_cdf(lart_params.a[jj] * est_l.first + lart_params.b[jj]);
        const double pi = std_normal_cdf(irt_params.a[jj] * est_i.first + irt_params.b[jj]);
        mae_lart += std::fabs(data.R(i, jj) - pl);
        mae_irt += std::fabs(data.R(i, jj) - pi);
        ++count;
      }
    }
    report.fold_mae_lart.push_back(mae_lart / count);
    report.fold_mae_irt.push_back(mae_irt / count);
  }
  report.avg_mae_lart =
      std::accumulate(report.fold_mae_lart.begin(), report.fold_mae_lart.end(), 0.0) /
      n_folds;
  report.avg_mae_irt =
      std::accumulate(report.fold_mae_irt.begin(), report.fold_mae_irt.end(), 0.0) /
      n_folds;
  return report;
}

EfficiencyCurve item_efficiency_curve(const ResponseDataset& data,
                                      const PopulationParams& lart_params,
                                      const PopulationParams& irt_params,
                                      int init_items, int budget) {
  if (!data.complete())
    throw std::domain_error("item_efficiency_curve: requires complete data");
  const int n = data.n_subjects, j = data.n_items;
  if (init_items < 0 || budget > j || init_items >= budget)
    throw std::domain_error("item_efficiency_curve: bad budget range");

  const Eigen::MatrixXd logT = data.log_T();
  EfficiencyCurve curve;
  for (int b = init_items; b <= budget; ++b) curve.budgets.push_back(b);
  const int n_points = static_cast<int>(curve.budgets.size());

  for (int method = 0; method < 2; ++method) {
    const PopulationParams& params = (method == 0) ? lart_params : irt_params;
    const std::vector<TraitEstimate> full = score_dataset(params, data);
    Eigen::MatrixXd theta_at(n, n_points);
    for (int i = 0; i < n; ++i) {
      std::vector<int> init_idx;
      std::vector<std::pair<int, double>> init_resp;
      for (int k = 0; k < init_items; ++k) {
        init_idx.push_back(k);
        init_resp.emplace_back(data.R(i, k), logT(i, k));
      }
      CatSession s = start_session(params, init_idx, init_resp, data.subject_ids[i]);
      theta_at(i, 0) = s.current.theta_hat;
      for (int b = init_items + 1; b <= budget; ++b) {
        const int next = select_next_item(s);
        record_response(s, next, data.R(i, next), logT(i, next));
        theta_at(i, b - init_items) = s.current.theta_hat;
      }
    }
    for (int p = 0; p < n_points; ++p) {
      double ss = 0;
      for (int i = 0; i < n; ++i) {
        const double d = theta_at(i, p) - full[i].theta_hat;
        ss += d * d;
      }
      const double dist = std::sqrt(ss / n);
      if (method == 0) curve.dist_lart.push_back(dist);
      else curve.dist_irt.push_back(dist);
    }
  }
  return curve;
}

ValidityReport validity_variance(const ResponseDataset& data, int n_splits,
                                 std::uint64_t split_seed,
                                 const FitConfig& base_cfg) {
  if (n_splits < 2 || data.n_items % n_splits != 0)
    throw std::domain_error("validity_variance: J must divide into n_splits nonempty sets");
  RngStream rng(split_seed, 1);
  const std::vector<int> perm = permutation(data.n_items, rng);
  const int per = data.n_items / n_splits;

  Eigen::MatrixXd theta_lart(data.n_subjects, n_splits);
  Eigen::MatrixXd theta_irt(data.n_subjects, n_splits);
  for (int s = 0; s < n_splits; ++s) {
    std::vector<int> cols(perm.begin() + s * per, perm.begin() + (s + 1) * per);
    std::sort(cols.begin(), cols.end());
    const ResponseDataset sub = subset_columns(data, cols);
    FitConfig lc = base_cfg;
    lc.mode = ModelMode::lart;
    lc.seed = mix_seed(base_cfg.seed, 100 + s);
    FitConfig ic = lc;
    ic.mode = ModelMode::irt;
    const PopulationParams pl = fit_dataset(sub, lc).params;
    const PopulationParams pi = fit_dataset(sub, ic).params;
    theta_lart.col(s) = theta_of(score_dataset(pl, sub));
    theta_irt.col(s) = theta_of(score_dataset(pi, sub));
  }

  ValidityReport out;
  for (int i = 0; i < data.n_subjects; ++i) {
    for (int method = 0; method < 2; ++method) {
      const Eigen::MatrixXd& m = (method == 0) ? theta_lart : theta_irt;
      const double mean = m.row(i).mean();
      double ss = 0;
      for (int s = 0; s < n_splits; ++s) {
        const double d = m(i, s) - mean;
        ss += d * d;
      }
      const double var = ss / (n_splits - 1);
      if (method == 0) out.total_var_lart += var;
      else out.total_var_irt += var;
    }
  }
  return out;
}

LlmEfficiencyReport llm_efficiency(const ResponseDataset& data,
                                   const std::vector<int>& sizes,
                                   std::uint64_t perm_seed,
                                   const FitConfig& base_cfg) {
  if (sizes.empty() || sizes.back() != data.n_subjects)
    throw std::domain_error("llm_efficiency: sizes must end at N");
  for (std::size_t s = 1; s < sizes.size(); ++s)
    if (sizes[s] <= sizes[s - 1])
      throw std::domain_error("llm_efficiency: sizes must be strictly increasing");

  RngStream rng(perm_seed, 2);
  const std::vector<int> perm = permutation(data.n_subjects, rng);

  LlmEfficiencyReport report;
  report.sizes = sizes;
  std::vector<PopulationParams> fits_lart, fits_irt;
  for (int size : sizes) {
    std::vector<int> rows(perm.begin(), perm.begin() + size);
    const ResponseDataset sub = subset_rows(data, rows);
    FitConfig lc = base_cfg;
    lc.mode = ModelMode::lart;
    FitConfig ic = base_cfg;
    ic.mode = ModelMode::irt;
    fits_lart.push_back(fit_dataset(sub, lc).params);
    fits_irt.push_back(fit_dataset(sub, ic).params);
  }
  const PopulationParams& full_l = fits_lart.back();
  const PopulationParams& full_i = fits_irt.back();
  const double sj = std::sqrt(static_cast<double>(data.n_items));
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    report.dist_a_lart.push_back((fits_lart[s].a - full_l.a).norm() / sj);
    report.dist_b_lart.push_back((fits_lart[s].b - full_l.b).norm() / sj);
    report.dist_a_irt.push_back((fits_irt[s].a - full_i.a).norm() / sj);
    report.dist_b_irt.push_back((fits_irt[s].b - full_i.b).norm() / sj);
  }
  report.max_abs_b_lart = fits_lart.front().b.cwiseAbs().maxCoeff();
  report.max_abs_b_irt = fits_irt.front().b.cwiseAbs().maxCoeff();
  return report;
}

InitComparisonReport init_comparison(const SimConfig& sim_cfg,
                                     const FitConfig& base_cfg) {
  InitComparisonReport report;
  for (int rep = 0; rep < sim_cfg.n_replications; ++rep) {
    SimConfig sc = sim_cfg;
    sc.seed = mix_seed(sim_cfg.seed, rep);
    auto [data, truth] = gen_synthetic(sc);

    FitConfig spectral_cfg = base_cfg;
    spectral_cfg.mode = ModelMode::lart;
    spectral_cfg.schedule = StepSchedule::decay;
    spectral_cfg.seed = mix_seed(base_cfg.seed, 1000 + rep);
    FitResult fit_spec = saem_fit(data, spectral_initialize(data), spectral_cfg);

    FitConfig burn_cfg = spectral_cfg;
    burn_cfg.schedule = StepSchedule::burn_in;
    PopulationParams naive = PopulationParams::zeros(data.n_items);
    naive.a.setOnes();
    naive.phi.setOnes();
    LatentTraits naive_traits;
    naive_traits.theta = Eigen::VectorXd::Zero(data.n_subjects);
    naive_traits.tau = Eigen::VectorXd::Zero(data.n_subjects);
    FitResult fit_burn = saem_fit(data, {naive, naive_traits}, burn_cfg);

    auto score_traits = [&](const PopulationParams& p) {
      const auto est = score_dataset(p, data);
      LatentTraits t;
      t.theta.resize(est.size());
      t.tau.resize(est.size());
      for (std::size_t i = 0; i < est.size(); ++i) {
        t.theta[i] = est[i].theta_hat;
        t.tau[i] = est[i].tau_hat;
      }
      return t;
    };
    const LatentTraits score_spec = score_traits(fit_spec.params);
    const LatentTraits score_burn = score_traits(fit_burn.params);

    report.spectral.push_back(
        rmse_report(truth.params, truth.traits, fit_spec.params, score_spec));
    report.burn_in.push_back(
        rmse_report(truth.params, truth.traits, fit_burn.params, score_burn));
  }
  return report;
}

}  // namespace lart
