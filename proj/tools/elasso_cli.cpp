// Command-line front end for the elasso library: solution paths, fits at a
// tuning value or constraint level, cross validation, model selection,
// sphericity calibration, conditional prediction, and simulation runs.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "elasso/elasso.hpp"

namespace {

using elasso::json;

[[noreturn]] void config_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  std::exit(2);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(s);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& f : split(s, ',')) {
    try {
      out.push_back(std::stoi(f));
    } catch (...) {
      config_error("cannot parse integer list: " + s);
    }
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& f : split(s, ',')) {
    double v;
    if (!elasso::detail::parse_double(f, v))
      config_error("cannot parse number list: " + s);
    out.push_back(v);
  }
  return out;
}

// Grid spec lo:hi:count[:log].
Eigen::VectorXd parse_grid(const std::string& spec) {
  auto parts = split(spec, ':');
  if (parts.size() != 3 && parts.size() != 4)
    config_error("grid must be lo:hi:count[:log], got " + spec);
  double lo, hi;
  int count = 0;
  if (!elasso::detail::parse_double(parts[0], lo) ||
      !elasso::detail::parse_double(parts[1], hi))
    config_error("cannot parse grid bounds: " + spec);
  try {
    count = std::stoi(parts[2]);
  } catch (...) {
    config_error("cannot parse grid count: " + spec);
  }
  bool log_scale = parts.size() == 4;
  if (log_scale && parts[3] != "log")
    config_error("grid suffix must be 'log', got " + parts[3]);
  if (count < 1 || hi < lo) config_error("bad grid range: " + spec);
  Eigen::VectorXd grid(count);
  if (count == 1) {
    grid[0] = lo;
  } else if (log_scale) {
    if (lo <= 0.0) config_error("log grid requires lo > 0");
    double ratio = std::log(hi / lo);
    for (int i = 0; i < count; ++i)
      grid[i] = lo * std::exp(ratio * i / (count - 1));
  } else {
    for (int i = 0; i < count; ++i)
      grid[i] = lo + (hi - lo) * i / (count - 1);
  }
  return grid;
}

// Weight spec: mp | cond | smallest | pairwise | file:PATH.
elasso::WeightSpec parse_weights(const std::string& spec, int q) {
  elasso::WeightSpec w;
  if (spec == "mp") {
    w.kind = elasso::WeightKind::mp;
  } else if (spec == "cond") {
    w.kind = elasso::WeightKind::cond;
  } else if (spec == "smallest") {
    w.kind = elasso::WeightKind::smallest;
  } else if (spec == "pairwise") {
    w.kind = elasso::WeightKind::pairwise;
  } else if (spec.rfind("file:", 0) == 0) {
    w.kind = elasso::WeightKind::fixed;
    w.fixed = elasso::read_weights(spec.substr(5), q).a;
  } else {
    config_error("unknown weight spec: " + spec +
                 " (expected mp|cond|smallest|pairwise|file:PATH)");
  }
  return w;
}

elasso::DataMatrix load_data(const std::string& path, bool sqrt_counts) {
  elasso::DataMatrix data = elasso::read_csv(path);
  if (sqrt_counts) {
    if ((data.values.array() < 0.0).any())
      config_error("--sqrt-counts requires nonnegative counts");
    data.values = (data.values.array() + 0.25).sqrt();
  }
  return data;
}

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream os(out_path);
  if (!os) config_error("cannot open output file: " + out_path);
  os << content;
  if (!content.empty() && content.back() != '\n') os << '\n';
}

struct CommonOpts {
  std::string input;
  std::string weights = "mp";
  std::string out;
  std::string format = "json";
  bool sqrt_counts = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_input = true) {
  if (needs_input)
    cmd->add_option("--input", o.input, "input CSV (rows = observations)")
        ->required();
  cmd->add_option("--weights", o.weights,
                  "penalty weights: mp|cond|smallest|pairwise|file:PATH "
                  "(mp = Marchenko-Pastur quantile weights)");
  cmd->add_option("--out", o.out, "output file (default stdout)");
  cmd->add_option("--format", o.format, "output format: json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_flag("--sqrt-counts", o.sqrt_counts,
                "transform entries x -> sqrt(x + 0.25) at ingestion");
}

std::string estimate_csv(const Eigen::VectorXd& lambda) {
  std::ostringstream os;
  os << "index,lambda\n";
  for (int j = 0; j < lambda.size(); ++j)
    os << (j + 1) << ',' << elasso::format_double(lambda[j]) << '\n';
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "elasso: eigenvalue-lassoed covariance estimation.\n"
      "Sample covariance uses divisor n (not n-1)."};
  app.require_subcommand(1);

  // ---- path ----------------------------------------------------------
  auto* cmd_path = app.add_subcommand(
      "path", "compute the full solution path (JSON) and optional curve CSV");
  CommonOpts path_o;
  add_common(cmd_path, path_o);
  std::string path_curve, path_grid;
  cmd_path->add_option("--curve", path_curve,
                       "also write a curve CSV (eta,index,lambda) here");
  cmd_path->add_option("--grid", path_grid,
                       "curve grid lo:hi:count[:log]; default geometric "
                       "around the knots");

  // ---- fit -----------------------------------------------------------
  auto* cmd_fit = app.add_subcommand(
      "fit", "estimate eigenvalues at a tuning value, constraint level, or "
             "model");
  CommonOpts fit_o;
  add_common(cmd_fit, fit_o);
  std::optional<double> fit_eta, fit_kappa;
  std::string fit_model;
  cmd_fit->add_option("--eta", fit_eta, "tuning value (>= 0)");
  cmd_fit->add_option("--kappa", fit_kappa,
                      "constraint level for the dual problem");
  cmd_fit->add_option("--model", fit_model,
                      "group sizes a,b,c for the model-restricted MLE");

  // ---- cv ------------------------------------------------------------
  auto* cmd_cv =
      app.add_subcommand("cv", "K-fold cross validation over a tuning grid");
  CommonOpts cv_o;
  add_common(cmd_cv, cv_o);
  int cv_k = 10;
  std::string cv_grid = "0:2.5:100";
  std::uint64_t cv_seed = 0;
  std::string cv_fold_weights = "refit";
  cmd_cv->add_option("--kfold", cv_k, "number of folds (default 10)");
  cmd_cv->add_option("--grid", cv_grid,
                     "tuning grid lo:hi:count[:log] (default 0:2.5:100)");
  cmd_cv->add_option("--seed", cv_seed, "fold-assignment seed")->required();
  cmd_cv->add_option("--fold-weights", cv_fold_weights,
                     "mp weights per training fold: fixed|refit")
      ->check(CLI::IsMember({"fixed", "refit"}));

  // ---- model-cv ------------------------------------------------------
  auto* cmd_mcv = app.add_subcommand(
      "model-cv", "cross validation over the models in the path hierarchy");
  CommonOpts mcv_o;
  add_common(cmd_mcv, mcv_o);
  int mcv_k = 10;
  std::string mcv_grid = "0:2.5:100";
  std::uint64_t mcv_seed = 0;
  std::string mcv_fold_weights = "refit";
  std::string mcv_mode = "approximate";
  cmd_mcv->add_option("--kfold", mcv_k, "number of folds (default 10)");
  cmd_mcv->add_option("--grid", mcv_grid,
                      "tuning grid lo:hi:count[:log] (default 0:2.5:100)");
  cmd_mcv->add_option("--seed", mcv_seed, "fold-assignment seed")->required();
  cmd_mcv->add_option("--fold-weights", mcv_fold_weights,
                      "mp weights per training fold: fixed|refit")
      ->check(CLI::IsMember({"fixed", "refit"}));
  cmd_mcv->add_option("--mode", mcv_mode,
                      "search mode: exhaustive|approximate")
      ->check(CLI::IsMember({"exhaustive", "approximate"}));

  // ---- calibrate -----------------------------------------------------
  auto* cmd_cal = app.add_subcommand(
      "calibrate",
      "tuning value from the largest-knot law under sphericity");
  CommonOpts cal_o;
  add_common(cmd_cal, cal_o, /*needs_input=*/false);
  int cal_q = 0, cal_n = 0, cal_nsim = 2000;
  double cal_eps = 0.05;
  std::uint64_t cal_seed = 0;
  cmd_cal->add_option("--q", cal_q, "dimension")->required();
  cmd_cal->add_option("--n", cal_n, "sample size")->required();
  cmd_cal->add_option("--epsilon", cal_eps,
                      "exceedance probability (default 0.05)");
  cmd_cal->add_option("--nsim", cal_nsim,
                      "number of simulated samples (default 2000)");
  cmd_cal->add_option("--seed", cal_seed, "simulation seed")->required();

  // ---- predict -------------------------------------------------------
  auto* cmd_pred = app.add_subcommand(
      "predict",
      "conditional prediction of the tail block from the head block");
  CommonOpts pred_o;
  add_common(cmd_pred, pred_o);
  std::string pred_rows;
  int pred_head = 0;
  std::optional<double> pred_eta;
  std::string pred_model;
  cmd_pred->add_option("--train-rows", pred_rows,
                       "training row range A:B (1-based, inclusive)")
      ->required();
  cmd_pred->add_option("--head", pred_head,
                       "number of conditioning variables p")
      ->required();
  cmd_pred->add_option("--eta", pred_eta, "tuning value for the fit");
  cmd_pred->add_option("--model", pred_model,
                       "group sizes a,b,c for a model-restricted fit");

  // ---- simulate ------------------------------------------------------
  auto* cmd_sim = app.add_subcommand(
      "simulate", "seeded spiked-model experiments and sample generation");
  CommonOpts sim_o;
  add_common(cmd_sim, sim_o, /*needs_input=*/false);
  std::string sim_experiment;
  std::string sim_sizes, sim_values;
  int sim_n = 0, sim_reps = 20, sim_q = 0, sim_topk = 2;
  double sim_sigma2 = 1.0;
  std::uint64_t sim_seed = 0;
  cmd_sim->add_option("--experiment", sim_experiment,
                      "experiment kind: sample|knots|mse")
      ->required()
      ->check(CLI::IsMember({"sample", "knots", "mse"}));
  cmd_sim->add_option("--sizes", sim_sizes, "model group sizes a,b,c");
  cmd_sim->add_option("--values", sim_values, "model group values x,y,z");
  cmd_sim->add_option("--n", sim_n, "sample size")->required();
  cmd_sim->add_option("--q", sim_q, "dimension (mse experiment)");
  cmd_sim->add_option("--sigma2", sim_sigma2,
                      "noise variance (mse experiment, default 1)");
  cmd_sim->add_option("--replicates", sim_reps,
                      "number of replicates (default 20)");
  cmd_sim->add_option("--top-knots", sim_topk,
                      "how many top knots to record (knots experiment)");
  cmd_sim->add_option("--seed", sim_seed, "simulation seed")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*cmd_path) {
      auto data = load_data(path_o.input, path_o.sqrt_counts);
      auto wspec = parse_weights(path_o.weights, data.q());
      auto spec = elasso::sample_covariance(data);
      auto w = elasso::resolve_weights(wspec, data.q(), data.n());
      elasso::ElassoPath path(spec.eigenvalues, w);
      write_output(path_o.out, elasso::path_to_json(path).dump(2));
      if (!path_curve.empty()) {
        Eigen::VectorXd grid;
        if (!path_grid.empty()) {
          grid = parse_grid(path_grid);
        } else {
          // Geometric grid bracketing the finite knots, starting at zero.
          double hi = std::max(path.largest_finite_knot() * 1.5, 1e-3);
          double lo = hi;
          for (double k : path.knots())
            if (k > 0.0) lo = std::min(lo, k);
          lo = std::max(lo * 0.25, hi * 1e-4);
          Eigen::VectorXd g = parse_grid(
              elasso::format_double(lo) + ":" + elasso::format_double(hi) +
              ":99:log");
          grid.resize(100);
          grid[0] = 0.0;
          grid.tail(99) = g;
        }
        std::ofstream os(path_curve);
        if (!os) config_error("cannot open curve file: " + path_curve);
        elasso::write_curve_csv(os, path, grid);
      }
    } else if (*cmd_fit) {
      int modes = (fit_eta.has_value() ? 1 : 0) +
                  (fit_kappa.has_value() ? 1 : 0) + (fit_model.empty() ? 0 : 1);
      if (modes != 1)
        config_error("fit requires exactly one of --eta, --kappa, --model");
      auto data = load_data(fit_o.input, fit_o.sqrt_counts);
      auto wspec = parse_weights(fit_o.weights, data.q());
      auto spec = elasso::sample_covariance(data);
      auto w = elasso::resolve_weights(wspec, data.q(), data.n());
      json out;
      Eigen::VectorXd lambda;
      if (fit_eta) {
        if (*fit_eta < 0.0) config_error("--eta must be >= 0");
        elasso::ElassoPath path(spec.eigenvalues, w);
        lambda = path.solve_at(*fit_eta);
        out["eta"] = *fit_eta;
        out["kappa"] = elasso::kappa_of_eta(path, *fit_eta);
      } else if (fit_kappa) {
        auto sol = elasso::constrained_solve(spec.eigenvalues, w, *fit_kappa);
        lambda = sol.estimate;
        out["eta"] = sol.eta;
        out["kappa"] = sol.kappa;
      } else {
        auto sizes = parse_int_list(fit_model);
        auto path = elasso::model_path(spec.eigenvalues, w, sizes);
        lambda = path.solve_at(0.0);
        out["model"] = sizes;
        out["eta"] = 0.0;
      }
      out["eigenvalues"] = elasso::to_json(lambda);
      out["sample_eigenvalues"] = elasso::to_json(spec.eigenvalues);
      write_output(fit_o.out, fit_o.format == "csv"
                                  ? estimate_csv(lambda)
                                  : out.dump(2));
    } else if (*cmd_cv) {
      auto data = load_data(cv_o.input, cv_o.sqrt_counts);
      auto wspec = parse_weights(cv_o.weights, data.q());
      auto mode = cv_fold_weights == "fixed" ? elasso::FoldWeights::fixed
                                             : elasso::FoldWeights::refit;
      auto result = elasso::kfold_cv(data, wspec, parse_grid(cv_grid), cv_k,
                                     cv_seed, mode);
      write_output(cv_o.out, elasso::cv_to_json(result).dump(2));
    } else if (*cmd_mcv) {
      auto data = load_data(mcv_o.input, mcv_o.sqrt_counts);
      auto wspec = parse_weights(mcv_o.weights, data.q());
      auto fmode = mcv_fold_weights == "fixed" ? elasso::FoldWeights::fixed
                                               : elasso::FoldWeights::refit;
      auto smode = mcv_mode == "exhaustive"
                       ? elasso::ModelCVMode::exhaustive
                       : elasso::ModelCVMode::approximate;
      auto result = elasso::model_cv(data, wspec, parse_grid(mcv_grid), mcv_k,
                                     mcv_seed, smode, fmode);
      write_output(mcv_o.out, elasso::model_cv_to_json(result).dump(2));
    } else if (*cmd_cal) {
      elasso::WeightSpec wspec = parse_weights(cal_o.weights, cal_q);
      double eta = elasso::calibrate_eta_sphericity(cal_q, cal_n, cal_eps,
                                                    cal_nsim, cal_seed, wspec);
      json out;
      out["q"] = cal_q;
      out["n"] = cal_n;
      out["epsilon"] = cal_eps;
      out["nsim"] = cal_nsim;
      out["seed"] = cal_seed;
      out["eta"] = eta;
      write_output(cal_o.out, out.dump(2));
    } else if (*cmd_pred) {
      if (pred_eta.has_value() == !pred_model.empty())
        config_error("predict requires exactly one of --eta, --model");
      auto parts = split(pred_rows, ':');
      if (parts.size() != 2) config_error("--train-rows must be A:B");
      int row_a = 0, row_b = 0;
      try {
        row_a = std::stoi(parts[0]);
        row_b = std::stoi(parts[1]);
      } catch (...) {
        config_error("cannot parse --train-rows " + pred_rows);
      }
      auto data = load_data(pred_o.input, pred_o.sqrt_counts);
      if (row_a < 1 || row_b < row_a || row_b > data.n())
        config_error("--train-rows out of range for " +
                     std::to_string(data.n()) + " rows");
      Eigen::MatrixXd train =
          data.values.middleRows(row_a - 1, row_b - row_a + 1);
      Eigen::MatrixXd test(data.n() - train.rows(),
                           data.q());
      int t = 0;
      for (int i = 0; i < data.n(); ++i)
        if (i < row_a - 1 || i > row_b - 1) test.row(t++) = data.values.row(i);
      if (test.rows() == 0) config_error("no test rows outside --train-rows");

      auto wspec = parse_weights(pred_o.weights, data.q());
      auto spec = elasso::sample_covariance(elasso::DataMatrix{train});
      auto w = elasso::resolve_weights(
          wspec, data.q(), static_cast<int>(train.rows()));
      elasso::Spectrum fitted = spec;
      if (pred_eta) {
        elasso::ElassoPath path(spec.eigenvalues, w);
        fitted.eigenvalues = path.solve_at(*pred_eta);
      } else {
        auto path = elasso::model_path(spec.eigenvalues, w,
                                       parse_int_list(pred_model));
        fitted.eigenvalues = path.solve_at(0.0);
      }
      auto psplit =
          elasso::make_prediction_split(pred_head, fitted, spec.mean);
      Eigen::MatrixXd preds(test.rows(), data.q() - pred_head);
      for (int i = 0; i < test.rows(); ++i)
        preds.row(i) = elasso::conditional_predict(
                           psplit, test.row(i).head(pred_head).transpose())
                           .transpose();
      auto result =
          elasso::aafe(preds, test.rightCols(data.q() - pred_head));
      std::ostringstream os;
      os << "t,aafe\n";
      for (int j = 0; j < result.per_component.size(); ++j)
        os << (pred_head + 1 + j) << ','
           << elasso::format_double(result.per_component[j]) << '\n';
      os << "average," << elasso::format_double(result.average) << '\n';
      write_output(pred_o.out, os.str());
    } else if (*cmd_sim) {
      if (sim_experiment == "mse") {
        if (sim_q < 1) config_error("mse experiment requires --q");
        auto r = elasso::mse_experiment(sim_q, sim_n, sim_sigma2, sim_reps,
                                        sim_seed);
        json out;
        out["experiment"] = "mse";
        out["q"] = sim_q;
        out["n"] = sim_n;
        out["sigma2"] = sim_sigma2;
        out["replicates"] = sim_reps;
        out["seed"] = sim_seed;
        out["per_replicate_sample"] = r.per_rep_sample;
        out["per_replicate_sphere"] = r.per_rep_sphere;
        out["mse_sample"] = r.mse_sample;
        out["mse_sphere"] = r.mse_sphere;
        out["ratio"] = r.ratio;
        out["reference_ratio"] = r.theoretical_ratio;
        write_output(sim_o.out, out.dump(2));
      } else {
        if (sim_sizes.empty() || sim_values.empty())
          config_error(sim_experiment +
                       " experiment requires --sizes and --values");
        auto model = elasso::make_spiked_model(parse_int_list(sim_sizes),
                                               parse_double_list(sim_values));
        if (sim_experiment == "sample") {
          auto data = elasso::sample_gaussian(model, sim_n, sim_seed);
          std::ostringstream os;
          for (int i = 0; i < data.n(); ++i) {
            for (int j = 0; j < data.q(); ++j) {
              if (j) os << ',';
              os << elasso::format_double(data.values(i, j));
            }
            os << '\n';
          }
          write_output(sim_o.out, os.str());
        } else {
          auto wspec = parse_weights(sim_o.weights, model.q);
          auto r = elasso::knot_experiment(model, sim_n, wspec, sim_reps,
                                           sim_seed, sim_topk);
          json out;
          out["experiment"] = "knots";
          out["sizes"] = sim_sizes;
          out["values"] = sim_values;
          out["n"] = sim_n;
          out["replicates"] = sim_reps;
          out["seed"] = sim_seed;
          json reps = json::array();
          for (int i = 0; i < r.top_knots.rows(); ++i)
            reps.push_back(elasso::to_json(r.top_knots.row(i).transpose()));
          out["top_knots"] = reps;
          out["mean"] = elasso::to_json(r.mean);
          out["sd"] = elasso::to_json(r.sd);
          write_output(sim_o.out, out.dump(2));
        }
      }
    }
  } catch (const elasso::SingularCovariance& e) {
    std::cerr << "error: SingularCovariance: " << e.what() << "\n";
    return 3;
  } catch (const elasso::SingularBlock& e) {
    std::cerr << "error: SingularBlock: " << e.what() << "\n";
    return 3;
  } catch (const elasso::NonpositiveDenominator& e) {
    std::cerr << "error: NonpositiveDenominator: " << e.what() << "\n";
    return 3;
  } catch (const elasso::NoConvergence& e) {
    std::cerr << "error: NoConvergence: " << e.what() << "\n";
    return 3;
  } catch (const elasso::NotSymmetric& e) {
    std::cerr << "error: NotSymmetric: " << e.what() << "\n";
    return 3;
  } catch (const elasso::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
