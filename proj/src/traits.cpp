#include "lart/traits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "lart/kernels.hpp"
#include "lart/saem.hpp"

namespace lart {

namespace {

struct SubjectTerms {
  const PopulationParams& p;
  const Eigen::VectorXi& r;
  const Eigen::VectorXd& l;
  const std::vector<int>& items;

  double objective(double th, double ta) const {
    double v = 0.0;
    for (int j : items) {
      const double sgn = 2.0 * r[j] - 1.0;
      v += log_std_normal_cdf(sgn * (p.a[j] * th + p.b[j]));
      const double e = l[j] - p.omega[j] + p.phi[j] * ta;
      v -= e * e / (2.0 * p.lambda[j]);
    }
    const double omr2 = 1.0 - p.rho * p.rho;
    v -= 0.5 * (th * th - 2.0 * p.rho * th * ta + ta * ta) / omr2;
    return v;
  }

  void grad_hess(double th, double ta, Eigen::Vector2d* g,
                 Eigen::Matrix2d* h) const {
    const double omr2 = 1.0 - p.rho * p.rho;
    double gt = 0.0, gu = 0.0, htt = 0.0, huu = 0.0;
    for (int j : items) {
      const double sgn = 2.0 * r[j] - 1.0;
      const double x = sgn * (p.a[j] * th + p.b[j]);
      const double hz = normal_hazard(x);
      gt += sgn * p.a[j] * hz;
      htt -= p.a[j] * p.a[j] * hz * (x + hz);
      const double e = l[j] - p.omega[j] + p.phi[j] * ta;
      gu -= p.phi[j] * e / p.lambda[j];
      huu -= p.phi[j] * p.phi[j] / p.lambda[j];
    }
    gt -= (th - p.rho * ta) / omr2;
    gu -= (ta - p.rho * th) / omr2;
    (*g) << gt, gu;
    (*h)(0, 0) = htt - 1.0 / omr2;
    (*h)(1, 1) = huu - 1.0 / omr2;
    (*h)(0, 1) = (*h)(1, 0) = p.rho / omr2;
  }
};

}  // namespace

std::pair<double, double> map_estimate(const PopulationParams& params,
                                       const Eigen::VectorXi& r_row,
                                       const Eigen::VectorXd& logT_row,
                                       const std::vector<int>& items) {
  check_params(params);
  if (items.empty()) return {0.0, 0.0};
  const SubjectTerms terms{params, r_row, logT_row, items};

  Eigen::Vector2d xi(0.0, 0.0), g;
  Eigen::Matrix2d h;
  double obj = terms.objective(0.0, 0.0);
  for (int it = 0; it < 200; ++it) {
    terms.grad_hess(xi[0], xi[1], &g, &h);
    if (g.cwiseAbs().maxCoeff() < 1e-10) return {xi[0], xi[1]};
    const Eigen::Vector2d step = -h.inverse() * g;
    if (step.cwiseAbs().maxCoeff() < 1e-14) return {xi[0], xi[1]};
    // Halve until the objective does not decrease (up to rounding noise).
    const double slack = 1e-12 * (1.0 + std::fabs(obj));
    double scale = 1.0;
    for (int half = 0; half < 60; ++half) {
      const Eigen::Vector2d cand = xi + scale * step;
      const double cand_obj = terms.objective(cand[0], cand[1]);
      if (cand_obj >= obj - slack) {
        xi = cand;
        obj = cand_obj;
        break;
      }
      scale *= 0.5;
    }
  }
  terms.grad_hess(xi[0], xi[1], &g, &h);
  if (g.cwiseAbs().maxCoeff() < 1e-8) return {xi[0], xi[1]};
  throw std::runtime_error(
      "map_estimate: Newton failed to converge; gradient max-norm " +
      std::to_string(g.cwiseAbs().maxCoeff()));
}

Eigen::Matrix2d information_matrix(const PopulationParams& params, double theta,
                                   const std::vector<int>& items) {
  check_params(params);
  const double omr2 = 1.0 - params.rho * params.rho;
  Eigen::Matrix2d info;
  double acc = 0.0, cot = 0.0;
  for (int j : items) {
    const double m = params.a[j] * theta + params.b[j];
    const double log_term = 2.0 * log_std_normal_pdf(m) -
                            log_std_normal_cdf(m) - log_std_normal_cdf(-m);
    acc += params.a[j] * params.a[j] * std::exp(log_term);
    cot += params.phi[j] * params.phi[j] / params.lambda[j];
  }
  info(0, 0) = 1.0 / omr2 + acc;
  info(1, 1) = 1.0 / omr2 + cot;
  info(0, 1) = info(1, 0) = -params.rho / omr2;
  return info;
}

TraitEstimate confidence_interval(std::pair<double, double> est,
                                  const Eigen::Matrix2d& info, double level) {
  if (!(level > 0.0 && level < 1.0))
    throw std::domain_error("confidence_interval: level outside (0,1)");
  const double det = info.determinant();
  if (!(det > 0.0) || !(info(0, 0) > 0.0))
    throw std::runtime_error("confidence_interval: information not positive definite");
  const Eigen::Matrix2d inv = info.inverse();
  const double z = std_normal_quantile(0.5 * (1.0 + level));
  TraitEstimate out;
  out.theta_hat = est.first;
  out.tau_hat = est.second;
  out.info = info;
  out.ci_level = level;
  const double ht = z * std::sqrt(inv(0, 0));
  const double hu = z * std::sqrt(inv(1, 1));
  out.theta_ci = {est.first - ht, est.first + ht};
  out.tau_ci = {est.second - hu, est.second + hu};
  return out;
}

TraitEstimate score_subject(const PopulationParams& params,
                            const Eigen::VectorXi& r_row,
                            const Eigen::VectorXd& logT_row,
                            const std::vector<int>& items, double level) {
  const auto est = map_estimate(params, r_row, logT_row, items);
  const Eigen::Matrix2d info = information_matrix(params, est.first, items);
  return confidence_interval(est, info, level);
}

std::vector<TraitEstimate> score_dataset(const PopulationParams& params,
                                         const ResponseDataset& data,
                                         double level, int threads) {
  const int n = data.n_subjects, j = data.n_items;
  std::vector<TraitEstimate> out(n);
  const int n_threads = resolve_threads(threads);
  auto worker = [&](int begin, int end) {
    Eigen::VectorXi r_row(j);
    Eigen::VectorXd l_row(j);
    for (int i = begin; i < end; ++i) {
      std::vector<int> items;
      items.reserve(j);
      for (int k = 0; k < j; ++k)
        if (data.observed(i, k)) items.push_back(k);
      r_row = data.R.row(i);
      for (int k = 0; k < j; ++k)
        l_row[k] = data.observed(i, k) ? std::log(data.T(i, k)) : 0.0;
      out[i] = score_subject(params, r_row, l_row, items, level);
    }
  };
  if (n_threads == 1 || n < 2 * n_threads) {
    worker(0, n);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n + n_threads - 1) / n_threads;
    for (int w = 0; w < n_threads; ++w) {
      const int b = w * chunk, e = std::min(n, b + chunk);
      if (b >= e) break;
      pool.emplace_back(worker, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

}  // namespace lart
