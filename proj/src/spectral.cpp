#include "lart/spectral.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lart/kernels.hpp"

namespace lart {

std::pair<PopulationParams, LatentTraits> spectral_initialize(
    const ResponseDataset& data, const SpectralConfig& cfg) {
  if (data.n_subjects < 2 || data.n_items < 2)
    throw std::domain_error("spectral_initialize: need N >= 2 and J >= 2");
  if (!data.complete())
    throw std::domain_error("spectral_initialize: requires complete data");
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 0.5))
    throw std::domain_error("spectral_initialize: epsilon outside (0, 0.5)");

  const int n = data.n_subjects, j = data.n_items;
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  // Step 1: low-rank denoising of the response matrix.
  Eigen::MatrixXd rd = data.R.cast<double>();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(rd, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = 1.01 * std::sqrt(static_cast<double>(std::max(n, j)));
  int k_keep = 0;
  for (int k = 0; k < sv.size(); ++k)
    if (sv[k] >= cutoff) k_keep = k + 1;
  k_keep = std::max(k_keep, cfg.k_latent + 1);
  k_keep = std::min<int>(k_keep, sv.size());

  Eigen::MatrixXd recon = svd.matrixU().leftCols(k_keep) *
                          sv.head(k_keep).asDiagonal() *
                          svd.matrixV().leftCols(k_keep).transpose();

  // Step 2: clamp and invert the probit link entrywise.
  Eigen::MatrixXd m_tilde(n, j);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < j; ++k) {
      const double p = std::clamp(recon(i, k), cfg.epsilon, 1.0 - cfg.epsilon);
      m_tilde(i, k) = std_normal_quantile(p);
    }

  PopulationParams p = PopulationParams::zeros(j);
  LatentTraits traits;

  // Step 3: intercepts as column means; center.
  p.b = m_tilde.colwise().mean();
  Eigen::MatrixXd mc = m_tilde.rowwise() - p.b.transpose();

  const Eigen::MatrixXd logT = data.log_T();
  p.omega = logT.colwise().mean();
  Eigen::MatrixXd lc = logT.rowwise() - p.omega.transpose();

  // Step 4: rank-1 factors of both centered matrices.
  Eigen::BDCSVD<Eigen::MatrixXd> svd_m(mc, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::BDCSVD<Eigen::MatrixXd> svd_l(lc, Eigen::ComputeThinU | Eigen::ComputeThinV);

  Eigen::VectorXd theta = sqrt_n * svd_m.matrixU().col(0);
  p.a = (svd_m.singularValues()[0] / sqrt_n) * svd_m.matrixV().col(0);
  Eigen::VectorXd tau = sqrt_n * svd_l.matrixU().col(0);
  p.phi = (svd_l.singularValues()[0] / sqrt_n) * svd_l.matrixV().col(0);

  // Step 5: canonical orientation (positive loading sums).
  if (p.a.sum() < 0.0) { p.a = -p.a; theta = -theta; }
  if (p.phi.sum() < 0.0) { p.phi = -p.phi; tau = -tau; }
  // CoT model is omega - phi*tau, so a rank-1 fit of lc = u*v' corresponds to
  // phi = -v scaling; flip tau accordingly.
  tau = -tau;

  // Step 6: correlation and residual variances.
  p.rho = std::clamp(theta.dot(tau) / n, -0.999, 0.999);
  for (int k = 0; k < j; ++k) {
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = lc(i, k) + p.phi[k] * tau[i];
      ss += r * r;
    }
    p.lambda[k] = std::max(ss / n, 1e-6);
  }

  traits.theta = std::move(theta);
  traits.tau = std::move(tau);
  check_params(p);
  return {std::move(p), std::move(traits)};
}

}  // namespace lart
