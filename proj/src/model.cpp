#include "lart/model.hpp"

#include <cmath>
#include <stdexcept>

#include "lart/kernels.hpp"

namespace lart {

PopulationParams PopulationParams::zeros(int j) {
  PopulationParams p;
  p.a = Eigen::VectorXd::Zero(j);
  p.b = Eigen::VectorXd::Zero(j);
  p.omega = Eigen::VectorXd::Zero(j);
  p.phi = Eigen::VectorXd::Zero(j);
  p.lambda = Eigen::VectorXd::Ones(j);
  p.rho = 0.0;
  return p;
}

void check_params(const PopulationParams& p) {
  const int j = p.n_items();
  if (p.b.size() != j || p.omega.size() != j || p.phi.size() != j ||
      p.lambda.size() != j)
    throw std::domain_error("params: inconsistent vector lengths");
  for (int k = 0; k < j; ++k) {
    if (!std::isfinite(p.a[k]) || !std::isfinite(p.b[k]) ||
        !std::isfinite(p.omega[k]) || !std::isfinite(p.phi[k]) ||
        !std::isfinite(p.lambda[k]))
      throw std::domain_error("params: non-finite entry");
    if (!(p.lambda[k] > 0.0)) throw std::domain_error("params: lambda must be > 0");
  }
  if (!(std::fabs(p.rho) < 1.0)) throw std::domain_error("params: |rho| must be < 1");
}

double complete_log_posterior(const PopulationParams& params,
                              const LatentTraits& traits,
                              const ResponseDataset& data) {
  check_params(params);
  const int n = data.n_subjects;
  const int j = data.n_items;
  if (params.n_items() != j || traits.theta.size() != n || traits.tau.size() != n)
    throw std::domain_error("complete_log_posterior: dimension mismatch");

  const bool irt = (params.mode == ModelMode::irt);
  const double rho = params.rho;
  const double one_m_r2 = 1.0 - rho * rho;
  const Eigen::MatrixXd logT = data.log_T();

  double ll = 0.0;
  for (int i = 0; i < n; ++i) {
    const double th = traits.theta[i];
    const double ta = traits.tau[i];
    for (int k = 0; k < j; ++k) {
      if (!data.observed(i, k)) continue;
      const double sgn = 2.0 * data.R(i, k) - 1.0;
      ll += log_std_normal_cdf(sgn * (params.a[k] * th + params.b[k]));
      if (!irt) {
        const double e = logT(i, k) - params.omega[k] + params.phi[k] * ta;
        ll -= e * e / (2.0 * params.lambda[k]);
      }
    }
    if (irt) {
      ll -= 0.5 * th * th;
    } else {
      // xi' Sigma^{-1} xi with Sigma = [[1,rho],[rho,1]]
      ll -= 0.5 * (th * th - 2.0 * rho * th * ta + ta * ta) / one_m_r2;
    }
  }
  if (!irt) {
    for (int k = 0; k < j; ++k) ll -= n * std::log(params.lambda[k]);
    ll -= 0.5 * n * std::log(one_m_r2);
  }
  if (!std::isfinite(ll))
    throw std::runtime_error("complete_log_posterior: non-finite value");
  return ll;
}

MarginalMoments marginal_moments(const PopulationParams& params) {
  check_params(params);
  const int j = params.n_items();
  MarginalMoments m;
  m.p_correct.resize(j);
  m.mean_log_t.resize(j);
  m.var_log_t.resize(j);
  m.accuracy_corr = Eigen::MatrixXd::Zero(j, j);
  m.cot_corr = Eigen::MatrixXd::Zero(j, j);
  m.cross_corr = Eigen::MatrixXd::Zero(j, j);

  Eigen::VectorXd sa(j), sp(j);  // sqrt(a^2+1), sqrt(phi^2+lambda)
  for (int k = 0; k < j; ++k) {
    sa[k] = std::sqrt(params.a[k] * params.a[k] + 1.0);
    sp[k] = std::sqrt(params.phi[k] * params.phi[k] + params.lambda[k]);
    m.p_correct[k] = std_normal_cdf(params.b[k] / sa[k]);
    m.mean_log_t[k] = params.omega[k];
    m.var_log_t[k] = params.phi[k] * params.phi[k] + params.lambda[k];
  }
  for (int j1 = 0; j1 < j; ++j1) {
    for (int j2 = 0; j2 < j; ++j2) {
      m.accuracy_corr(j1, j2) = params.a[j1] * params.a[j2] / (sa[j1] * sa[j2]);
      m.cot_corr(j1, j2) = params.phi[j1] * params.phi[j2] / (sp[j1] * sp[j2]);
      m.cross_corr(j1, j2) =
          -params.rho * params.a[j1] * params.phi[j2] / (sa[j1] * sp[j2]);
    }
  }
  return m;
}

}  // namespace lart
