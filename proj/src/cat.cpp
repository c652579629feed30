#include "lart/cat.hpp"

#include <cmath>
#include <stdexcept>

#include "lart/kernels.hpp"

namespace lart {

namespace {

TraitEstimate refit(const CatSession& s) {
  const int j = s.pool->n_items();
  Eigen::VectorXi r_row = Eigen::VectorXi::Zero(j);
  Eigen::VectorXd l_row = Eigen::VectorXd::Zero(j);
  for (std::size_t k = 0; k < s.administered.size(); ++k) {
    r_row[s.administered[k]] = s.responses[k].first;
    l_row[s.administered[k]] = s.responses[k].second;
  }
  return score_subject(*s.pool, r_row, l_row, s.administered, s.ci_level);
}

}  // namespace

CatSession start_session(const PopulationParams& params,
                         const std::vector<int>& initial_items,
                         const std::vector<std::pair<int, double>>& responses,
                         const std::string& subject_id, double ci_level) {
  check_params(params);
  if (initial_items.size() != responses.size())
    throw std::domain_error("start_session: items/responses length mismatch");
  CatSession s;
  s.subject_id = subject_id;
  s.pool = &params;
  s.ci_level = ci_level;
  s.available.assign(params.n_items(), 1);
  for (int j : initial_items) {
    if (j < 0 || j >= params.n_items())
      throw std::domain_error("start_session: unknown item index");
    if (!s.available[j])
      throw std::domain_error("start_session: duplicate initial item");
    s.available[j] = 0;
  }
  s.administered = initial_items;
  s.responses = responses;
  s.current = refit(s);
  return s;
}

double item_information(const PopulationParams& params, int j, double theta) {
  const double m = params.a[j] * theta + params.b[j];
  const double log_term = 2.0 * log_std_normal_pdf(m) - log_std_normal_cdf(m) -
                          log_std_normal_cdf(-m);
  return params.a[j] * params.a[j] * std::exp(log_term);
}

int select_next_item(const CatSession& session) {
  int best = -1;
  double best_info = -1.0;
  for (int j = 0; j < session.pool->n_items(); ++j) {
    if (!session.available[j]) continue;
    const double info = item_information(*session.pool, j, session.current.theta_hat);
    if (info > best_info) {
      best_info = info;
      best = j;
    }
  }
  if (best < 0) throw std::runtime_error("select_next_item: item pool exhausted");
  return best;
}

void record_response(CatSession& session, int item, int r, double log_t) {
  if (item < 0 || item >= session.pool->n_items())
    throw std::domain_error("record_response: unknown item index");
  if (!session.available[item])
    throw std::domain_error("record_response: item already administered");
  session.available[item] = 0;
  session.administered.push_back(item);
  session.responses.emplace_back(r, log_t);
  session.current = refit(session);
}

}  // namespace lart
