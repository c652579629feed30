#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lart/cat.hpp"
#include "lart/kernels.hpp"
#include "lart/rng.hpp"
#include "lart/traits.hpp"

using namespace lart;

namespace {

PopulationParams random_pool(int j, RngStream& rng) {
  PopulationParams p = PopulationParams::zeros(j);
  for (int k = 0; k < j; ++k) {
    p.a[k] = 0.5 + rng.uniform();
    p.b[k] = rng.normal();
    p.omega[k] = rng.normal();
    p.phi[k] = 0.5 + rng.uniform();
    p.lambda[k] = 0.5 + 1.5 * rng.uniform();
  }
  p.rho = -0.6;
  return p;
}

std::vector<std::pair<int, double>> random_responses(int n, RngStream& rng) {
  std::vector<std::pair<int, double>> v;
  for (int k = 0; k < n; ++k)
    v.emplace_back(rng.uniform() < 0.5 ? 0 : 1, rng.normal());
  return v;
}

}  // namespace

TEST_CASE("session start") {
  RngStream rng(71, 0);
  const PopulationParams pool = random_pool(20, rng);

  SUBCASE("empty start is the prior") {
    const CatSession s = start_session(pool, {}, {});
    CHECK(s.current.theta_hat == 0.0);
    CHECK(s.current.tau_hat == 0.0);
    // Information is the prior precision.
    Eigen::Matrix2d prior_prec;
    const double omr2 = 1.0 - pool.rho * pool.rho;
    prior_prec << 1.0 / omr2, -pool.rho / omr2, -pool.rho / omr2, 1.0 / omr2;
    CHECK((s.current.info - prior_prec).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("initial items reproduce the batch scorer") {
    const std::vector<int> items = {3, 7, 0, 12, 18, 5, 9, 14, 1, 11};
    const auto resp = random_responses(10, rng);
    const CatSession s = start_session(pool, items, resp, "subj");
    Eigen::VectorXi r = Eigen::VectorXi::Zero(20);
    Eigen::VectorXd lt = Eigen::VectorXd::Zero(20);
    for (int k = 0; k < 10; ++k) {
      r[items[k]] = resp[k].first;
      lt[items[k]] = resp[k].second;
    }
    const TraitEstimate direct = score_subject(pool, r, lt, items, 0.95);
    CHECK(s.current.theta_hat == direct.theta_hat);
    CHECK(s.current.tau_hat == direct.tau_hat);
    CHECK(s.current.theta_ci == direct.theta_ci);
    CHECK(s.current.tau_ci == direct.tau_ci);
  }

  SUBCASE("argument validation") {
    CHECK_THROWS_AS(start_session(pool, {0, 1}, random_responses(3, rng)),
                    std::domain_error);
    CHECK_THROWS_AS(start_session(pool, {0, 0}, random_responses(2, rng)),
                    std::domain_error);
    CHECK_THROWS_AS(start_session(pool, {25}, random_responses(1, rng)),
                    std::domain_error);
  }
}

TEST_CASE("item selection") {
  SUBCASE("matched difficulty wins at the current ability") {
    PopulationParams pool = PopulationParams::zeros(2);
    pool.a << 1.0, 1.0;
    pool.b << 5.0, 0.0;
    pool.lambda.setOnes();
    const CatSession s = start_session(pool, {}, {});
    CHECK(select_next_item(s) == 1);
  }

  SUBCASE("zero-loading items are never selected while informative ones remain") {
    RngStream rng(72, 0);
    PopulationParams pool = random_pool(10, rng);
    pool.a[2] = pool.a[6] = 0.0;
    CatSession s = start_session(pool, {}, {});
    for (int step = 0; step < 8; ++step) {
      const int j = select_next_item(s);
      CHECK(j != 2);
      CHECK(j != 6);
      record_response(s, j, step % 2, 0.1 * step);
    }
    // Only the uninformative items are left now.
    const int j = select_next_item(s);
    CHECK((j == 2 || j == 6));
  }

  SUBCASE("selection matches a brute-force information argmax") {
    RngStream rng(73, 0);
    for (int rep = 0; rep < 20; ++rep) {
      const PopulationParams pool = random_pool(50, rng);
      CatSession s = start_session(pool, {0, 1}, random_responses(2, rng));
      const double th = s.current.theta_hat;
      int best = -1;
      double best_info = -1.0;
      for (int k = 2; k < 50; ++k) {
        const double m = pool.a[k] * th + pool.b[k];
        const double pdf = std::exp(-0.5 * m * m) / std::sqrt(2.0 * M_PI);
        const double cdf = std_normal_cdf(m);
        const double info = pool.a[k] * pool.a[k] * pdf * pdf / (cdf * (1.0 - cdf));
        if (info > best_info) {
          best_info = info;
          best = k;
        }
      }
      CHECK(select_next_item(s) == best);
    }
  }

  SUBCASE("ties break toward the smallest index") {
    PopulationParams pool = PopulationParams::zeros(4);
    pool.a << 0.8, 1.0, 1.0, 0.8;
    pool.b << 1.0, 0.0, 0.0, -1.0;
    pool.lambda.setOnes();
    const CatSession s = start_session(pool, {}, {});
    CHECK(select_next_item(s) == 1);
  }

  SUBCASE("selection ignores the CoT parameters") {
    RngStream rng(74, 0);
    PopulationParams pool = random_pool(15, rng);
    for (int k = 0; k < 15; ++k)
      CHECK(item_information(pool, k, 0.37) ==
            item_information(pool, k, 0.37));
    PopulationParams shifted = pool;
    shifted.omega.array() += 2.0;
    shifted.phi.array() *= 3.0;
    for (int k = 0; k < 15; ++k)
      CHECK(item_information(pool, k, 0.37) ==
            item_information(shifted, k, 0.37));
  }

  SUBCASE("exhausted pool throws") {
    PopulationParams pool = PopulationParams::zeros(2);
    pool.a << 1.0, 1.0;
    pool.lambda.setOnes();
    RngStream rng(75, 0);
    CatSession s = start_session(pool, {0, 1}, random_responses(2, rng));
    CHECK_THROWS_AS(select_next_item(s), std::runtime_error);
  }
}

TEST_CASE("recording responses") {
  RngStream rng(76, 0);
  const PopulationParams pool = random_pool(30, rng);

  SUBCASE("incremental sessions equal one-shot sessions") {
    CatSession s = start_session(pool, {}, {});
    std::vector<int> items;
    std::vector<std::pair<int, double>> resp;
    double prev_info = s.current.info(0, 0);
    for (int step = 0; step < 12; ++step) {
      const int j = select_next_item(s);
      const int r = rng.uniform() < 0.5 ? 0 : 1;
      const double lt = rng.normal();
      record_response(s, j, r, lt);
      items.push_back(j);
      resp.emplace_back(r, lt);
      // Ability information never decreases as items accumulate.
      CHECK(s.current.info(0, 0) >= prev_info);
      prev_info = s.current.info(0, 0);

      const CatSession fresh = start_session(pool, items, resp);
      CHECK(s.current.theta_hat == fresh.current.theta_hat);
      CHECK(s.current.tau_hat == fresh.current.tau_hat);
      CHECK(s.current.theta_ci == fresh.current.theta_ci);
      CHECK(s.administered == fresh.administered);
    }
  }

  SUBCASE("double administration is rejected") {
    CatSession s = start_session(pool, {4}, random_responses(1, rng));
    CHECK_THROWS_AS(record_response(s, 4, 1, 0.0), std::domain_error);
    CHECK_THROWS_AS(record_response(s, -1, 1, 0.0), std::domain_error);
    CHECK_THROWS_AS(record_response(s, 30, 1, 0.0), std::domain_error);
  }
}

TEST_CASE("sessions are deterministic") {
  RngStream rng(77, 0);
  const PopulationParams pool = random_pool(25, rng);
  const auto resp = random_responses(5, rng);
  std::vector<double> trace1, trace2;
  for (std::vector<double>* trace : {&trace1, &trace2}) {
    CatSession s = start_session(pool, {0, 1, 2, 3, 4}, resp);
    for (int step = 0; step < 10; ++step) {
      const int j = select_next_item(s);
      record_response(s, j, step % 2, 0.3 * step - 1.0);
      trace->push_back(s.current.theta_hat);
      trace->push_back(static_cast<double>(j));
    }
  }
  CHECK(trace1 == trace2);
}
