#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lart/cat.hpp"
#include "lart/eval.hpp"
#include "lart/io.hpp"
#include "lart/model.hpp"
#include "lart/saem.hpp"
#include "lart/sampler.hpp"
#include "lart/spectral.hpp"
#include "lart/traits.hpp"

namespace {

using lart::FitConfig;
using lart::ModelMode;
using lart::PopulationParams;
using lart::ResponseDataset;

lart::ParamLaw parse_law(const std::string& text) {
  // "uniform:lo:hi" or "normal:mean:var"
  std::stringstream ss(text);
  std::string kind, p1, p2;
  if (!std::getline(ss, kind, ':') || !std::getline(ss, p1, ':') ||
      !std::getline(ss, p2, ':'))
    throw CLI::ValidationError("law", "expected kind:p1:p2");
  lart::ParamLaw law;
  if (kind == "uniform") law.kind = lart::ParamLaw::Kind::uniform;
  else if (kind == "normal") law.kind = lart::ParamLaw::Kind::normal;
  else throw CLI::ValidationError("law", "kind must be uniform or normal");
  law.p1 = std::stod(p1);
  law.p2 = std::stod(p2);
  return law;
}

std::string timestamp_from_env() {
  if (const char* ts = std::getenv("LART_TIMESTAMP")) return ts;
  return "";
}

// Reorder model params to match the dataset's item order (join on item_id).
PopulationParams align_params(const lart::ModelFile& model,
                              const ResponseDataset& data) {
  PopulationParams p = PopulationParams::zeros(data.n_items);
  p.rho = model.params.rho;
  p.mode = model.params.mode;
  for (int j = 0; j < data.n_items; ++j) {
    int src = -1;
    for (std::size_t k = 0; k < model.item_ids.size(); ++k)
      if (model.item_ids[k] == data.item_ids[j]) { src = static_cast<int>(k); break; }
    if (src < 0)
      throw std::runtime_error("dataset item '" + data.item_ids[j] +
                               "' not present in model");
    p.a[j] = model.params.a[src];
    p.b[j] = model.params.b[src];
    p.omega[j] = model.params.omega[src];
    p.phi[j] = model.params.phi[src];
    p.lambda[j] = model.params.lambda[src];
  }
  return p;
}

void require_valid(const ResponseDataset& data) {
  const auto violations = lart::validate(data);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "invalid dataset:";
    for (const auto& v : violations)
      msg << "\n  (" << v.row << "," << v.col << ") " << v.reason;
    throw std::runtime_error(msg.str());
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Joint accuracy / chain-of-thought-length psychometric modeling"};
  app.require_subcommand(1);

  // ---- simulate ----
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset");
  int sim_n = 500, sim_j = 50;
  double sim_rho = -0.8;
  std::uint64_t sim_seed = 0;
  std::string sim_out, sim_truth;
  std::string law_a, law_b, law_omega, law_phi, law_lambda;
  sim->add_option("--n", sim_n, "Number of subjects");
  sim->add_option("--j", sim_j, "Number of items");
  sim->add_option("--rho", sim_rho, "Latent correlation");
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--out", sim_out, "Output dataset CSV")->required();
  sim->add_option("--truth", sim_truth, "Output truth JSON");
  sim->add_option("--law-a", law_a, "Law for a (kind:p1:p2)");
  sim->add_option("--law-b", law_b, "Law for b");
  sim->add_option("--law-omega", law_omega, "Law for omega");
  sim->add_option("--law-phi", law_phi, "Law for phi");
  sim->add_option("--law-lambda", law_lambda, "Law for lambda");

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "Fit a model to a dataset");
  std::string fit_data, fit_out, fit_mode = "lart";
  std::uint64_t fit_seed = 0;
  int fit_iters = 500, fit_samples = 1, fit_threads = 0;
  double fit_tol = 1e-4;
  bool no_spectral = false;
  fit->add_option("--data", fit_data, "Input dataset CSV")->required();
  fit->add_option("--out", fit_out, "Output model JSON")->required();
  fit->add_option("--mode", fit_mode, "lart or irt")
      ->check(CLI::IsMember({"lart", "irt"}));
  fit->add_option("--seed", fit_seed, "RNG seed");
  fit->add_option("--max-iters", fit_iters, "Maximum iterations");
  fit->add_option("--tol", fit_tol, "Convergence tolerance");
  fit->add_option("--samples", fit_samples, "Monte Carlo draws per iteration");
  fit->add_option("--threads", fit_threads, "Worker threads (0 = auto)");
  fit->add_flag("--no-spectral-init", no_spectral,
                "Use naive init + burn-in schedule instead of spectral init");

  // ---- score ----
  auto* score = app.add_subcommand("score", "Score subjects with a fitted model");
  std::string score_model, score_data, score_out;
  double score_ci = 0.95;
  int score_threads = 0;
  score->add_option("--model", score_model, "Model JSON")->required();
  score->add_option("--data", score_data, "Dataset CSV")->required();
  score->add_option("--out", score_out, "Output traits CSV")->required();
  score->add_option("--ci", score_ci, "Confidence level");
  score->add_option("--threads", score_threads, "Worker threads (0 = auto)");

  // ---- cat ----
  auto* cat = app.add_subcommand("cat", "Adaptive testing over a response pool");
  std::string cat_model, cat_data, cat_out;
  int cat_init = 10, cat_budget = 0;
  cat->add_option("--model", cat_model, "Model JSON")->required();
  cat->add_option("--data", cat_data, "Pool dataset CSV (complete)")->required();
  cat->add_option("--init-items", cat_init, "Initial batch size");
  cat->add_option("--budget", cat_budget, "Total items to administer")->required();
  cat->add_option("--out", cat_out, "Output curve CSV")->required();

  // ---- eval ----
  auto* eval = app.add_subcommand("eval", "Evaluation experiments");
  std::string eval_kind, eval_data, eval_out;
  std::uint64_t eval_seed = 0;
  int eval_folds = 5, eval_splits = 5, eval_init_items = 10, eval_budget = 0;
  int eval_reps = 20, eval_n = 200, eval_j = 50, eval_iters = 150;
  double eval_rho = -0.8;
  std::string eval_sizes;
  eval->add_option("experiment", eval_kind,
                   "predictive|item-efficiency|validity|llm-efficiency|init-compare")
      ->required()
      ->check(CLI::IsMember({"predictive", "item-efficiency", "validity",
                             "llm-efficiency", "init-compare"}));
  eval->add_option("--data", eval_data, "Dataset CSV");
  eval->add_option("--seed", eval_seed, "RNG seed");
  eval->add_option("--out", eval_out, "Output report JSON")->required();
  eval->add_option("--folds", eval_folds, "Folds for predictive");
  eval->add_option("--splits", eval_splits, "Splits for validity");
  eval->add_option("--init-items", eval_init_items, "CAT initial batch");
  eval->add_option("--budget", eval_budget, "CAT budget (default J)");
  eval->add_option("--sizes", eval_sizes, "Comma list of subset sizes");
  eval->add_option("--reps", eval_reps, "Replications for init-compare");
  eval->add_option("--n", eval_n, "Subjects for init-compare");
  eval->add_option("--j", eval_j, "Items for init-compare");
  eval->add_option("--rho", eval_rho, "True correlation for init-compare");
  eval->add_option("--max-iters", eval_iters, "SAEM iterations per fit");

  // ---- moments ----
  auto* mom = app.add_subcommand("moments", "Closed-form model moments");
  std::string mom_model, mom_out, mom_pairs;
  mom->add_option("--model", mom_model, "Model JSON")->required();
  mom->add_option("--out", mom_out, "Per-item moments CSV")->required();
  mom->add_option("--pairs", mom_pairs, "Optional pairwise correlations CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage error
  }

  if (sim->parsed()) {
    lart::SimConfig cfg;
    cfg.n_subjects = sim_n;
    cfg.n_items = sim_j;
    cfg.rho_true = sim_rho;
    cfg.seed = sim_seed;
    if (!law_a.empty()) cfg.law_a = parse_law(law_a);
    if (!law_b.empty()) cfg.law_b = parse_law(law_b);
    if (!law_omega.empty()) cfg.law_omega = parse_law(law_omega);
    if (!law_phi.empty()) cfg.law_phi = parse_law(law_phi);
    if (!law_lambda.empty()) cfg.law_lambda = parse_law(law_lambda);
    auto [data, truth] = lart::gen_synthetic(cfg);
    lart::save_dataset(data, sim_out);
    if (!sim_truth.empty()) {
      std::ofstream out(sim_truth);
      if (!out) throw std::runtime_error("cannot open " + sim_truth);
      auto arr = [](const Eigen::VectorXd& v) {
        std::string s = "[";
        for (int i = 0; i < v.size(); ++i) {
          if (i) s += ", ";
          s += lart::format_double(v[i]);
        }
        return s + "]";
      };
      out << "{\n"
          << "  \"a\": " << arr(truth.params.a) << ",\n"
          << "  \"b\": " << arr(truth.params.b) << ",\n"
          << "  \"lambda\": " << arr(truth.params.lambda) << ",\n"
          << "  \"omega\": " << arr(truth.params.omega) << ",\n"
          << "  \"phi\": " << arr(truth.params.phi) << ",\n"
          << "  \"rho\": " << lart::format_double(truth.params.rho) << ",\n"
          << "  \"tau\": " << arr(truth.traits.tau) << ",\n"
          << "  \"theta\": " << arr(truth.traits.theta) << "\n"
          << "}\n";
    }
    return 0;
  }

  if (fit->parsed()) {
    const ResponseDataset data = lart::load_dataset(fit_data);
    require_valid(data);
    FitConfig cfg;
    cfg.max_iters = fit_iters;
    cfg.mc_samples = fit_samples;
    cfg.tol = fit_tol;
    cfg.seed = fit_seed;
    cfg.threads = fit_threads;
    cfg.mode = (fit_mode == "irt") ? ModelMode::irt : ModelMode::lart;
    lart::FitResult result;
    if (no_spectral) {
      cfg.schedule = lart::StepSchedule::burn_in;
      PopulationParams naive = PopulationParams::zeros(data.n_items);
      naive.a.setOnes();
      naive.phi.setOnes();
      lart::LatentTraits t;
      t.theta = Eigen::VectorXd::Zero(data.n_subjects);
      t.tau = Eigen::VectorXd::Zero(data.n_subjects);
      result = (cfg.mode == ModelMode::irt)
                   ? lart::fit_irt_baseline(data, {naive, t}, cfg)
                   : lart::saem_fit(data, {naive, t}, cfg);
    } else {
      result = lart::fit_dataset(data, cfg);
    }
    lart::ModelFile model;
    model.params = result.params;
    model.item_ids = data.item_ids;
    model.meta.seed = fit_seed;
    model.meta.iters = result.iters_run;
    model.meta.tol = fit_tol;
    model.meta.converged = result.converged;
    model.meta.timestamp = timestamp_from_env();
    model.meta.data_digest = lart::data_digest(data);
    lart::save_model(model, fit_out);
    return 0;
  }

  if (score->parsed()) {
    const lart::ModelFile model = lart::load_model(score_model);
    const ResponseDataset data = lart::load_dataset(score_data);
    require_valid(data);
    const PopulationParams params = align_params(model, data);
    const auto estimates = lart::score_dataset(params, data, score_ci, score_threads);
    std::ofstream out(score_out);
    if (!out) throw std::runtime_error("cannot open " + score_out);
    out << "subject_id,theta,tau,theta_lo,theta_hi,tau_lo,tau_hi\n";
    for (int i = 0; i < data.n_subjects; ++i) {
      const auto& e = estimates[i];
      out << data.subject_ids[i] << ',' << lart::format_double(e.theta_hat) << ','
          << lart::format_double(e.tau_hat) << ','
          << lart::format_double(e.theta_ci[0]) << ','
          << lart::format_double(e.theta_ci[1]) << ','
          << lart::format_double(e.tau_ci[0]) << ','
          << lart::format_double(e.tau_ci[1]) << '\n';
    }
    return 0;
  }

  if (cat->parsed()) {
    const lart::ModelFile model = lart::load_model(cat_model);
    const ResponseDataset data = lart::load_dataset(cat_data);
    require_valid(data);
    if (!data.complete())
      throw std::runtime_error("cat: pool dataset must be complete");
    const PopulationParams params = align_params(model, data);
    if (cat_budget <= cat_init || cat_budget > data.n_items)
      throw std::runtime_error("cat: budget must lie in (init-items, J]");
    const Eigen::MatrixXd logT = data.log_T();
    std::ofstream out(cat_out);
    if (!out) throw std::runtime_error("cannot open " + cat_out);
    out << "subject_id,step,item_id,correct,theta,theta_lo,theta_hi\n";
    for (int i = 0; i < data.n_subjects; ++i) {
      std::vector<int> init_idx;
      std::vector<std::pair<int, double>> init_resp;
      for (int k = 0; k < cat_init; ++k) {
        init_idx.push_back(k);
        init_resp.emplace_back(data.R(i, k), logT(i, k));
      }
      lart::CatSession s =
          lart::start_session(params, init_idx, init_resp, data.subject_ids[i]);
      for (int step = cat_init + 1; step <= cat_budget; ++step) {
        const int next = lart::select_next_item(s);
        lart::record_response(s, next, data.R(i, next), logT(i, next));
        out << data.subject_ids[i] << ',' << step << ',' << data.item_ids[next]
            << ',' << data.R(i, next) << ','
            << lart::format_double(s.current.theta_hat) << ','
            << lart::format_double(s.current.theta_ci[0]) << ','
            << lart::format_double(s.current.theta_ci[1]) << '\n';
      }
    }
    return 0;
  }

  if (eval->parsed()) {
    nlohmann::json report;
    FitConfig cfg;
    cfg.max_iters = eval_iters;
    cfg.seed = eval_seed;
    report["experiment"] = eval_kind;
    report["seed"] = eval_seed;
    if (eval_kind == "init-compare") {
      lart::SimConfig sc;
      sc.n_subjects = eval_n;
      sc.n_items = eval_j;
      sc.rho_true = eval_rho;
      sc.seed = eval_seed;
      sc.n_replications = eval_reps;
      const auto rep = lart::init_comparison(sc, cfg);
      auto dump = [](const std::vector<lart::RmseReport>& v) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : v)
          arr.push_back({{"a", r.a}, {"b", r.b}, {"omega", r.omega},
                         {"phi", r.phi}, {"lambda", r.lambda},
                         {"theta", r.theta}, {"tau", r.tau},
                         {"rho_abs_err", r.rho_abs_err},
                         {"theta_kendall", r.theta_kendall}});
        return arr;
      };
      report["spectral"] = dump(rep.spectral);
      report["burn_in"] = dump(rep.burn_in);
    } else {
      if (eval_data.empty())
        throw std::runtime_error("eval " + eval_kind + ": --data is required");
      const ResponseDataset data = lart::load_dataset(eval_data);
      require_valid(data);
      if (eval_kind == "predictive") {
        const auto rep = lart::predictive_power(data, eval_folds, eval_seed, cfg);
        report["fold_mae_lart"] = rep.fold_mae_lart;
        report["fold_mae_irt"] = rep.fold_mae_irt;
        report["avg_mae_lart"] = rep.avg_mae_lart;
        report["avg_mae_irt"] = rep.avg_mae_irt;
      } else if (eval_kind == "item-efficiency") {
        FitConfig lc = cfg;
        lc.mode = ModelMode::lart;
        FitConfig ic = cfg;
        ic.mode = ModelMode::irt;
        const auto lart_fit = lart::fit_dataset(data, lc);
        const auto irt_fit = lart::fit_dataset(data, ic);
        const int budget = (eval_budget > 0) ? eval_budget : data.n_items;
        const auto curve = lart::item_efficiency_curve(
            data, lart_fit.params, irt_fit.params, eval_init_items, budget);
        report["budgets"] = curve.budgets;
        report["dist_lart"] = curve.dist_lart;
        report["dist_irt"] = curve.dist_irt;
      } else if (eval_kind == "validity") {
        const auto rep = lart::validity_variance(data, eval_splits, eval_seed, cfg);
        report["total_var_lart"] = rep.total_var_lart;
        report["total_var_irt"] = rep.total_var_irt;
      } else if (eval_kind == "llm-efficiency") {
        std::vector<int> sizes;
        if (!eval_sizes.empty()) {
          std::stringstream ss(eval_sizes);
          std::string tok;
          while (std::getline(ss, tok, ',')) sizes.push_back(std::stoi(tok));
        } else {
          const int n = data.n_subjects;
          for (int s : {n / 4, n / 2, n})
            if (s >= 2 && (sizes.empty() || s > sizes.back())) sizes.push_back(s);
        }
        const auto rep = lart::llm_efficiency(data, sizes, eval_seed, cfg);
        report["sizes"] = rep.sizes;
        report["dist_a_lart"] = rep.dist_a_lart;
        report["dist_b_lart"] = rep.dist_b_lart;
        report["dist_a_irt"] = rep.dist_a_irt;
        report["dist_b_irt"] = rep.dist_b_irt;
        report["max_abs_b_lart"] = rep.max_abs_b_lart;
        report["max_abs_b_irt"] = rep.max_abs_b_irt;
      }
    }
    std::ofstream out(eval_out);
    if (!out) throw std::runtime_error("cannot open " + eval_out);
    out << report.dump(2) << "\n";
    return 0;
  }

  if (mom->parsed()) {
    const lart::ModelFile model = lart::load_model(mom_model);
    const auto m = lart::marginal_moments(model.params);
    std::ofstream out(mom_out);
    if (!out) throw std::runtime_error("cannot open " + mom_out);
    out << "item_id,p_correct,mean_log_t,var_log_t\n";
    for (int j = 0; j < model.params.n_items(); ++j)
      out << model.item_ids[j] << ',' << lart::format_double(m.p_correct[j]) << ','
          << lart::format_double(m.mean_log_t[j]) << ','
          << lart::format_double(m.var_log_t[j]) << '\n';
    if (!mom_pairs.empty()) {
      std::ofstream pout(mom_pairs);
      if (!pout) throw std::runtime_error("cannot open " + mom_pairs);
      pout << "item_id_1,item_id_2,accuracy_corr,cot_corr,cross_corr\n";
      for (int j1 = 0; j1 < model.params.n_items(); ++j1)
        for (int j2 = 0; j2 < model.params.n_items(); ++j2)
          pout << model.item_ids[j1] << ',' << model.item_ids[j2] << ','
               << lart::format_double(m.accuracy_corr(j1, j2)) << ','
               << lart::format_double(m.cot_corr(j1, j2)) << ','
               << lart::format_double(m.cross_corr(j1, j2)) << '\n';
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
