#include "lart/saem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <limits>
#include <stdexcept>
#include <thread>

#include "lart/kernels.hpp"
#include "lart/model.hpp"
#include "lart/sampler.hpp"

namespace lart {

int resolve_threads(int requested) {
  int t = requested;
  if (t <= 0) {
    if (const char* env = std::getenv("LART_THREADS")) t = std::atoi(env);
  }
  if (t <= 0) t = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(t, 1);
}

void SaSufficientStats::init(int n_subjects, int n_items) {
  n = n_subjects;
  s_theta = s_theta2 = s_tau = s_tau2 = s_theta_tau = 0.0;
  s_z = Eigen::VectorXd::Zero(n_items);
  s_z_theta = Eigen::VectorXd::Zero(n_items);
  s_logt_tau = Eigen::VectorXd::Zero(n_items);
  s_logt = Eigen::VectorXd::Zero(n_items);
  s_logt2 = Eigen::VectorXd::Zero(n_items);
}

void SaSufficientStats::blend(const SaSufficientStats& cur, double alpha) {
  const double keep = 1.0 - alpha;
  s_theta = keep * s_theta + alpha * cur.s_theta;
  s_theta2 = keep * s_theta2 + alpha * cur.s_theta2;
  s_tau = keep * s_tau + alpha * cur.s_tau;
  s_tau2 = keep * s_tau2 + alpha * cur.s_tau2;
  s_theta_tau = keep * s_theta_tau + alpha * cur.s_theta_tau;
  s_z = keep * s_z + alpha * cur.s_z;
  s_z_theta = keep * s_z_theta + alpha * cur.s_z_theta;
  s_logt_tau = keep * s_logt_tau + alpha * cur.s_logt_tau;
}

std::pair<double, double> m_step_item_accuracy(const SaSufficientStats& stats, int j) {
  const double n = stats.n;
  const double var = stats.s_theta2 - stats.s_theta * stats.s_theta / n;
  if (var <= 1e-10) return {0.0, stats.s_z[j] / n};
  const double a = (stats.s_z_theta[j] - stats.s_z[j] * stats.s_theta / n) / var;
  const double b = (stats.s_z[j] - a * stats.s_theta) / n;
  return {a, b};
}

CotParams m_step_item_cot(const SaSufficientStats& stats, int j) {
  const double n = stats.n;
  const double var = stats.s_tau2 - stats.s_tau * stats.s_tau / n;
  double phi;
  if (var <= 1e-10) {
    phi = 0.0;
  } else {
    phi = -(stats.s_logt_tau[j] - stats.s_logt[j] * stats.s_tau / n) / var;
  }
  const double omega = (stats.s_logt[j] + phi * stats.s_tau) / n;
  const double ssr = stats.s_logt2[j] - 2.0 * omega * stats.s_logt[j] +
                     2.0 * phi * stats.s_logt_tau[j] + n * omega * omega +
                     phi * phi * stats.s_tau2 -
                     2.0 * omega * phi * stats.s_tau;
  return {omega, phi, std::max(ssr / n, 1e-8)};
}

namespace {

double rho_profile(double rho, double s_tt, double s_uu, double s_tu, double n) {
  const double omr2 = 1.0 - rho * rho;
  return -0.5 * n * std::log(omr2) -
         0.5 * (s_tt - 2.0 * rho * s_tu + s_uu) / omr2;
}

}  // namespace

double m_step_rho(const SaSufficientStats& stats, int n) {
  const double s_tt = stats.s_theta2, s_uu = stats.s_tau2, s_tu = stats.s_theta_tau;
  const double nn = n;
  auto cubic = [&](double r) {
    return nn * r * r * r - s_tu * r * r + (s_tt + s_uu - nn) * r - s_tu;
  };
  // Bracket roots of the stationarity cubic on a fine grid, then bisect.
  constexpr int kGrid = 4096;
  const double lo = -0.9999999, hi = 0.9999999;
  std::vector<double> roots;
  double prev_x = lo, prev_v = cubic(lo);
  for (int i = 1; i <= kGrid; ++i) {
    const double x = lo + (hi - lo) * i / kGrid;
    const double v = cubic(x);
    if (v == 0.0) {
      roots.push_back(x);
    } else if (prev_v * v < 0.0) {
      double a = prev_x, b = x;
      for (int it = 0; it < 100; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = cubic(m);
        if (fm == 0.0) { a = b = m; break; }
        if (cubic(a) * fm < 0.0) b = m; else a = m;
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_x = x;
    prev_v = v;
  }
  double best = 0.0;
  if (roots.empty()) {
    const double denom = std::sqrt(std::max(s_tt * s_uu, 1e-300));
    best = s_tu / denom;
  } else {
    double best_val = -std::numeric_limits<double>::infinity();
    for (double r : roots) {
      const double v = rho_profile(r, s_tt, s_uu, s_tu, nn);
      if (v > best_val) { best_val = v; best = r; }
    }
  }
  return std::clamp(best, -0.999, 0.999);
}

double q_objective(const SaSufficientStats& st, const PopulationParams& p) {
  const double n = st.n;
  const int j = p.n_items();
  double q = 0.0;
  for (int k = 0; k < j; ++k) {
    const double a = p.a[k], b = p.b[k];
    q += a * st.s_z_theta[k] + b * st.s_z[k] -
         0.5 * (a * a * st.s_theta2 + 2.0 * a * b * st.s_theta + n * b * b);
  }
  if (p.mode == ModelMode::lart) {
    for (int k = 0; k < j; ++k) {
      const double w = p.omega[k], f = p.phi[k], l = p.lambda[k];
      const double ssr = st.s_logt2[k] - 2.0 * w * st.s_logt[k] +
                         2.0 * f * st.s_logt_tau[k] + n * w * w +
                         f * f * st.s_tau2 - 2.0 * w * f * st.s_tau;
      q += -0.5 * n * std::log(l) - 0.5 * ssr / l;
    }
    const double omr2 = 1.0 - p.rho * p.rho;
    q += -0.5 * n * std::log(omr2) -
         0.5 * (st.s_theta2 - 2.0 * p.rho * st.s_theta_tau + st.s_tau2) / omr2;
  } else {
    q += -0.5 * st.s_theta2;
  }
  return q;
}

void orientation_fix(PopulationParams& params, LatentTraits& traits) {
  if (params.a.size() > 0 && params.a.sum() < 0.0) {
    params.a = -params.a;
    if (traits.theta.size() > 0) traits.theta = -traits.theta;
    params.rho = -params.rho;
  }
  if (params.phi.size() > 0 && params.phi.sum() < 0.0) {
    params.phi = -params.phi;
    if (traits.tau.size() > 0) traits.tau = -traits.tau;
    params.rho = -params.rho;
  }
}

namespace {

struct SubjectDraw {
  double th1 = 0, th2 = 0, ta1 = 0, ta2 = 0, thta = 0;
  double last_theta = 0, last_tau = 0;
};

FitResult run_saem(const ResponseDataset& data,
                   std::pair<PopulationParams, LatentTraits> init,
                   const FitConfig& cfg) {
  if (!data.complete())
    throw std::domain_error("saem_fit: requires complete data");
  const int n = data.n_subjects, j = data.n_items;
  const bool irt = (cfg.mode == ModelMode::irt);
  const int n_threads = resolve_threads(cfg.threads);
  const int mc = std::max(cfg.mc_samples, 1);

  PopulationParams params = std::move(init.first);
  check_params(params);
  if (params.n_items() != j) throw std::domain_error("saem_fit: init dimension mismatch");
  if (irt) {
    params.omega.setZero();
    params.phi.setZero();
    params.lambda.setOnes();
    params.rho = 0.0;
    params.mode = ModelMode::irt;
  }

  const Eigen::MatrixXd logT = irt ? Eigen::MatrixXd::Zero(n, j) : data.log_T();
  const std::vector<int> items = all_items(j);

  SaSufficientStats stats;
  stats.init(n, j);
  if (!irt) {
    for (int k = 0; k < j; ++k) {
      for (int i = 0; i < n; ++i) {
        stats.s_logt[k] += logT(i, k);
        stats.s_logt2[k] += logT(i, k) * logT(i, k);
      }
    }
  }

  FitResult result;
  result.trace.reserve(cfg.max_iters);
  std::vector<SubjectDraw> draws(n);
  Eigen::MatrixXd zbar(n, j), zthbar(n, j);
  std::deque<double> change_window;
  Eigen::VectorXd prev_vec;

  auto param_vector = [&](const PopulationParams& p) {
    Eigen::VectorXd v(irt ? 2 * j : 5 * j + 1);
    v.head(j) = p.a;
    v.segment(j, j) = p.b;
    if (!irt) {
      v.segment(2 * j, j) = p.omega;
      v.segment(3 * j, j) = p.phi;
      v.segment(4 * j, j) = p.lambda;
      v[5 * j] = p.rho;
    }
    return v;
  };
  prev_vec = param_vector(params);

  for (int t = 1; t <= cfg.max_iters; ++t) {
    const double alpha =
        (cfg.schedule == StepSchedule::burn_in)
            ? (t <= cfg.burn_in_steps ? 1.0 : 1.0 / (t - cfg.burn_in_steps))
            : 1.0 / t;

    // S-step: per-subject draws with per-(iteration, subject) streams.
    auto worker = [&](int begin, int end) {
      Eigen::VectorXi r_row(j);
      Eigen::VectorXd l_row(j);
      for (int i = begin; i < end; ++i) {
        RngStream rng(cfg.seed,
                      (static_cast<std::uint64_t>(t) << 32) |
                          static_cast<std::uint64_t>(i));
        r_row = data.R.row(i);
        l_row = logT.row(i);
        const PosteriorFactors f = posterior_factors(params, r_row, l_row, items);
        const ThetaSampler ts(f);
        SubjectDraw d;
        Eigen::VectorXd zb = Eigen::VectorXd::Zero(j);
        Eigen::VectorXd ztb = Eigen::VectorXd::Zero(j);
        for (int c = 0; c < mc; ++c) {
          const double th = ts.draw(rng);
          const double ta = irt ? 0.0 : sample_tau_given_theta(rng, f, th);
          const Eigen::VectorXd z =
              sample_probit_augmentation(rng, params, th, r_row, items);
          d.th1 += th;
          d.th2 += th * th;
          d.ta1 += ta;
          d.ta2 += ta * ta;
          d.thta += th * ta;
          zb += z;
          ztb += th * z;
          if (c == mc - 1) { d.last_theta = th; d.last_tau = ta; }
        }
        const double inv = 1.0 / mc;
        d.th1 *= inv; d.th2 *= inv; d.ta1 *= inv; d.ta2 *= inv; d.thta *= inv;
        draws[i] = d;
        zbar.row(i) = (zb * inv).transpose();
        zthbar.row(i) = (ztb * inv).transpose();
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

    // Serial reduction in subject order (thread-count independent).
    SaSufficientStats cur;
    cur.init(n, j);
    for (int i = 0; i < n; ++i) {
      cur.s_theta += draws[i].th1;
      cur.s_theta2 += draws[i].th2;
      cur.s_tau += draws[i].ta1;
      cur.s_tau2 += draws[i].ta2;
      cur.s_theta_tau += draws[i].thta;
    }
    for (int k = 0; k < j; ++k) {
      double sz = 0, szt = 0, slt = 0;
      for (int i = 0; i < n; ++i) {
        sz += zbar(i, k);
        szt += zthbar(i, k);
        slt += logT(i, k) * draws[i].ta1;
      }
      cur.s_z[k] = sz;
      cur.s_z_theta[k] = szt;
      cur.s_logt_tau[k] = slt;
    }

    // SA-step.
    stats.blend(cur, alpha);

    // M-step.
    for (int k = 0; k < j; ++k) {
      auto [a, b] = m_step_item_accuracy(stats, k);
      if (a == 0.0 && stats.s_theta2 - stats.s_theta * stats.s_theta / n <= 1e-10)
        ++result.degenerate_msteps;
      params.a[k] = a;
      params.b[k] = b;
      if (!irt) {
        const CotParams cp = m_step_item_cot(stats, k);
        params.omega[k] = cp.omega;
        params.phi[k] = cp.phi;
        params.lambda[k] = cp.lambda;
      }
    }
    if (!irt) params.rho = m_step_rho(stats, n);

    // Trace + convergence bookkeeping.
    LatentTraits cur_traits;
    cur_traits.theta.resize(n);
    cur_traits.tau.resize(n);
    for (int i = 0; i < n; ++i) {
      cur_traits.theta[i] = draws[i].last_theta;
      cur_traits.tau[i] = draws[i].last_tau;
    }
    FitTraceEntry entry;
    entry.iteration = t;
    entry.alpha = alpha;
    const Eigen::VectorXd vec = param_vector(params);
    entry.param_norm = vec.norm();
    entry.objective = complete_log_posterior(params, cur_traits, data);
    if (!std::isfinite(entry.objective))
      throw std::runtime_error("saem_fit: non-finite objective at iteration " +
                               std::to_string(t));
    result.trace.push_back(entry);
    result.iters_run = t;
    result.last_traits = std::move(cur_traits);

    const double change = (vec - prev_vec).cwiseAbs().maxCoeff();
    prev_vec = vec;
    change_window.push_back(change);
    if (static_cast<int>(change_window.size()) > 20) change_window.pop_front();
    if (static_cast<int>(change_window.size()) == 20) {
      double avg = 0.0;
      for (double c : change_window) avg += c;
      avg /= 20.0;
      if (avg < cfg.tol) { result.converged = true; break; }
    }
  }

  orientation_fix(params, result.last_traits);
  result.params = std::move(params);
  return result;
}

}  // namespace

FitResult saem_fit(const ResponseDataset& data,
                   std::pair<PopulationParams, LatentTraits> init,
                   const FitConfig& cfg) {
  FitConfig c = cfg;
  return run_saem(data, std::move(init), c);
}

FitResult fit_irt_baseline(const ResponseDataset& data,
                           std::pair<PopulationParams, LatentTraits> init,
                           const FitConfig& cfg) {
  FitConfig c = cfg;
  c.mode = ModelMode::irt;
  return run_saem(data, std::move(init), c);
}

}  // namespace lart
