#include "mmreg/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "mmreg/calibration.hpp"
#include "mmreg/csv.hpp"
#include "mmreg/diagnostics.hpp"
#include "mmreg/json_io.hpp"
#include "mmreg/simulation.hpp"

namespace mmreg {

namespace {

using nlohmann::json;

void emit(const std::string& text, const std::string& output_path,
          std::ostream& out) {
  if (output_path.empty()) {
    out << text << "\n";
    return;
  }
  std::ofstream f(output_path);
  if (!f) throw DataError("cannot open output file: " + output_path);
  f << text << "\n";
}

std::vector<double> parse_grid(const std::string& grid) {
  std::vector<double> values;
  for (const auto& tok : split_list(grid)) {
    try {
      std::size_t pos = 0;
      values.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("cannot parse grid value '" + tok + "'");
    }
  }
  return values;
}

struct FitArgs {
  std::string input;
  std::string responses;
  std::string predictors;
  bool intercept = false;
  double are = 0.90;
  double b = 0.5;
  double delta = 1e-4;
  int max_iters = 500;
  int subsamples = 2000;
  std::uint64_t seed = 0;
  std::string output;
  bool strict = false;
};

void add_fit_options(CLI::App* cmd, FitArgs& a) {
  cmd->add_option("--input", a.input, "input CSV file")->required();
  cmd->add_option("--responses", a.responses, "comma-separated response columns")
      ->required();
  cmd->add_option("--predictors", a.predictors, "comma-separated predictor columns")
      ->required();
  cmd->add_flag("--intercept", a.intercept, "append a constant-1 predictor");
  cmd->add_option("--are", a.are, "target Gaussian efficiency (default 0.90)");
  cmd->add_option("--b", a.b, "M-scale level (default 0.5)");
  cmd->add_option("--delta", a.delta, "convergence threshold (default 1e-4)");
  cmd->add_option("--max-iters", a.max_iters, "iteration cap (default 500)");
  cmd->add_option("--subsamples", a.subsamples, "subsampling budget (default 2000)");
  cmd->add_option("--seed", a.seed, "RNG seed (default 0)");
  cmd->add_option("--output", a.output, "write JSON here instead of stdout");
  cmd->add_flag("--strict", a.strict, "exit 3 when the fit does not converge");
}

struct Fitted {
  Dataset data;
  MMConfig cfg;
  FitResult fit;
};

Fitted run_fit_pipeline(const FitArgs& a) {
  const CsvTable table = read_csv(a.input);
  Dataset data = dataset_from_csv(table, split_list(a.responses),
                                  split_list(a.predictors), a.intercept);

  const auto& constants = ConstantsTable::builtin();
  MMConfig cfg;
  cfg.b = a.b;
  cfg.c0 = constants.c0_or_solve(static_cast<int>(data.q()), a.b);
  cfg.c1 = constants.c1_or_solve(static_cast<int>(data.q()), a.are);
  cfg.delta = a.delta;
  cfg.max_iters = a.max_iters;

  SConfig s_cfg;
  s_cfg.n_subsamples = a.subsamples;
  s_cfg.seed = a.seed;
  s_cfg.b = a.b;

  const Bisquare k0(cfg.c0);
  const SCandidate init = s_estimate(data, s_cfg, k0);
  FitResult fit = mm_fit(data, cfg, init);
  return Fitted{std::move(data), cfg, std::move(fit)};
}

json config_json(const FitArgs& a, const MMConfig& cfg) {
  json j;
  j["b"] = cfg.b;
  j["c0"] = cfg.c0;
  j["c1"] = cfg.c1;
  j["target_are"] = a.are;
  j["delta"] = cfg.delta;
  j["max_iters"] = cfg.max_iters;
  j["subsamples"] = a.subsamples;
  j["seed"] = a.seed;
  j["intercept"] = a.intercept;
  return j;
}

int do_fit(const FitArgs& a, std::ostream& out) {
  Fitted f = run_fit_pipeline(a);
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "fit";
  j["n"] = f.data.n();
  j["p"] = f.data.p();
  j["q"] = f.data.q();
  j["config"] = config_json(a, f.cfg);
  j["fit"] = fit_result_to_json(f.fit);
  emit(j.dump(2), a.output, out);
  return (a.strict && !f.fit.converged) ? 3 : 0;
}

int do_diagnose(const FitArgs& a, const std::string& qq_csv, std::ostream& out) {
  Fitted f = run_fit_pipeline(a);
  const int q = static_cast<int>(f.data.q());
  const QQData qq = qq_data(f.fit, q);

  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "diagnose";
  j["config"] = config_json(a, f.cfg);
  j["fit"] = fit_result_to_json(f.fit);

  json jqq;
  jqq["observed"] = std::vector<double>(qq.sorted_norms.data(),
                                        qq.sorted_norms.data() + qq.sorted_norms.size());
  jqq["theoretical"] = std::vector<double>(
      qq.theoretical.data(), qq.theoretical.data() + qq.theoretical.size());
  jqq["flagged"] = qq.flagged;
  jqq["flag_threshold"] = qq.flag_threshold;
  j["qq"] = std::move(jqq);

  json jb;
  try {
    const Index k_n = hyperplane_max_count(f.data);
    jb["k_n"] = k_n;
    jb["exact"] = true;
    jb["bound"] = breakdown_lower_bound(f.data.n(), k_n, 0.5);
  } catch (const SizeError&) {
    // beyond the enumeration limit: fall back to the general-position value
    const Index k_n = f.data.p() + f.data.q() - 1;
    jb["k_n"] = k_n;
    jb["exact"] = false;
    jb["bound"] = breakdown_lower_bound(f.data.n(), k_n, 0.5);
  }
  j["breakdown"] = std::move(jb);

  if (f.fit.converged && f.fit.sigma > 0.0) {
    const AsymptoticCov cov =
        asymptotic_covariance(f.data, f.fit, Bisquare(f.cfg.c1));
    j["asymptotic_scalar_factor"] = cov.scalar_factor;
  } else {
    j["asymptotic_scalar_factor"] = nullptr;
  }

  if (!qq_csv.empty()) {
    std::ofstream csv(qq_csv);
    if (!csv) throw DataError("cannot open QQ CSV file: " + qq_csv);
    write_qq_csv(qq, csv);
  }
  emit(j.dump(2), a.output, out);
  return (a.strict && !f.fit.converged) ? 3 : 0;
}

int do_calibrate(int q, double are, double b, bool regen, const std::string& output,
                 std::ostream& out) {
  if (regen) {
    const ConstantsTable table = ConstantsTable::regenerate();
    std::ostringstream ss;
    table.save(ss);
    emit(ss.str(), output, out);
    return 0;
  }
  const CalibrationResult r = calibrate(q, are, b);
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "calibrate";
  j["q"] = r.q;
  j["b"] = r.b;
  j["c0"] = r.c0;
  j["c1"] = r.c1;
  j["target_are"] = r.target_are;
  j["achieved_are"] = r.achieved_are;
  emit(j.dump(2), output, out);
  return 0;
}

std::vector<EstimatorKind> parse_estimators(const std::string& s) {
  std::vector<EstimatorKind> kinds;
  for (const auto& tok : split_list(s)) {
    if (tok == "MLE")
      kinds.push_back(EstimatorKind::MLE);
    else if (tok == "S")
      kinds.push_back(EstimatorKind::S);
    else if (tok == "MM")
      kinds.push_back(EstimatorKind::MM);
    else
      throw UsageError("unknown estimator '" + tok + "' (expected MLE, S or MM)");
  }
  return kinds;
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"robust multivariate linear regression by MM estimation"};
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "fit the robust estimate to CSV data");
  add_fit_options(fit_cmd, fit_args);

  FitArgs diag_args;
  std::string qq_csv;
  auto* diag_cmd =
      app.add_subcommand("diagnose", "fit and export residual diagnostics");
  add_fit_options(diag_cmd, diag_args);
  diag_cmd->add_option("--qq-csv", qq_csv, "write the QQ table to this CSV file");

  int cal_q = 2;
  double cal_are = 0.90, cal_b = 0.5;
  bool cal_regen = false;
  std::string cal_output;
  auto* cal_cmd = app.add_subcommand("calibrate", "solve tuning constants");
  cal_cmd->add_option("--q", cal_q, "response dimension");
  cal_cmd->add_option("--are", cal_are, "target Gaussian efficiency");
  cal_cmd->add_option("--b", cal_b, "M-scale level");
  cal_cmd->add_flag("--regen", cal_regen, "regenerate the full constants table");
  cal_cmd->add_option("--output", cal_output, "write here instead of stdout");

  Scenario sc;
  std::string sim_m_grid, sim_estimators = "MLE,S,MM", sim_output, sim_csv;
  int sim_subsamples = 2000;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo study");
  sim_cmd->add_option("--p", sc.p, "number of predictors (default 2)");
  sim_cmd->add_option("--q", sc.q, "number of responses (default 2)");
  sim_cmd->add_option("--n", sc.n, "sample size (default 100)");
  sim_cmd->add_option("--reps", sc.reps, "replications (default 500)");
  sim_cmd->add_option("--contamination", sc.contamination_fraction,
                      "outlier fraction (default 0)");
  sim_cmd->add_option("--x0", sc.x0, "outlier leverage magnitude (default 10)");
  sim_cmd->add_option("--m-grid", sim_m_grid, "comma-separated slope grid");
  sim_cmd->add_option("--seed", sc.seed, "RNG seed (default 1)");
  sim_cmd->add_option("--threads", sc.threads, "worker threads (default 1)");
  sim_cmd->add_option("--are", sc.target_are, "target efficiency (default 0.90)");
  sim_cmd->add_option("--b", sc.b, "M-scale level (default 0.5)");
  sim_cmd->add_option("--subsamples", sim_subsamples, "subsampling budget");
  sim_cmd->add_option("--estimators", sim_estimators, "subset of MLE,S,MM");
  sim_cmd->add_option("--output", sim_output, "write JSON here instead of stdout");
  sim_cmd->add_option("--csv", sim_csv, "also write a long-format CSV here");

  FitArgs cv_args;
  int cv_folds = 5;
  auto* cv_cmd = app.add_subcommand("crossval", "k-fold prediction study");
  add_fit_options(cv_cmd, cv_args);
  cv_cmd->add_option("--folds", cv_folds, "number of folds (default 5)");

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("mmreg");
  for (const auto& a : args) argv_storage.push_back(a);
  std::vector<const char*> argv;
  for (const auto& s : argv_storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (fit_cmd->parsed()) return do_fit(fit_args, out);
    if (diag_cmd->parsed()) return do_diagnose(diag_args, qq_csv, out);
    if (cal_cmd->parsed())
      return do_calibrate(cal_q, cal_are, cal_b, cal_regen, cal_output, out);
    if (cv_cmd->parsed()) {
      const CsvTable table = read_csv(cv_args.input);
      const Dataset data =
          dataset_from_csv(table, split_list(cv_args.responses),
                           split_list(cv_args.predictors), cv_args.intercept);
      const auto& constants = ConstantsTable::builtin();
      MMConfig cfg;
      cfg.b = cv_args.b;
      cfg.c0 = constants.c0_or_solve(static_cast<int>(data.q()), cv_args.b);
      cfg.c1 = constants.c1_or_solve(static_cast<int>(data.q()), cv_args.are);
      cfg.delta = cv_args.delta;
      cfg.max_iters = cv_args.max_iters;
      SConfig s_cfg;
      s_cfg.n_subsamples = cv_args.subsamples;
      s_cfg.b = cv_args.b;
      const CVReport report =
          cross_validate(data, cv_folds, cfg, s_cfg, cv_args.seed);
      json j = cv_report_to_json(report);
      j["command"] = "crossval";
      j["folds"] = cv_folds;
      j["seed"] = cv_args.seed;
      emit(j.dump(2), cv_args.output, out);
      return 0;
    }
    if (sim_cmd->parsed()) {
      sc.estimators = parse_estimators(sim_estimators);
      sc.s_config.n_subsamples = sim_subsamples;
      if (!sim_m_grid.empty())
        sc.m_grid = parse_grid(sim_m_grid);
      else if (sc.contamination_fraction > 0.0)
        sc.m_grid = default_m_grid();
      const SimulationReport report = run_simulation(sc);
      if (!sim_csv.empty()) {
        std::ofstream csv(sim_csv);
        if (!csv) throw DataError("cannot open CSV file: " + sim_csv);
        write_simulation_csv(report, csv);
      }
      emit(simulation_report_to_json(report).dump(2), sim_output, out);
      return 0;
    }
    err << "usage_error: no subcommand selected\n";
    return 1;
  } catch (const UsageError& e) {
    err << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal_error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace mmreg
