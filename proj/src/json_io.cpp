#include "mmreg/json_io.hpp"

namespace mmreg {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  const auto rows = static_cast<Index>(j.size());
  const auto cols = rows > 0 ? static_cast<Index>(j.at(0).size()) : 0;
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index k = 0; k < cols; ++k)
      m(i, k) = j.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k));
  return m;
}

namespace {

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector vector_from_json(const json& j) {
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v[i] = j.at(static_cast<std::size_t>(i));
  return v;
}

}  // namespace

json fit_result_to_json(const FitResult& fit) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["B"] = matrix_to_json(fit.B);
  j["Gamma"] = matrix_to_json(fit.Gamma);
  j["Sigma"] = matrix_to_json(fit.Sigma);
  j["sigma"] = fit.sigma;
  j["distances"] = vector_to_json(fit.distances);
  j["weights"] = vector_to_json(fit.weights);
  j["objective_trace"] = fit.objective_trace;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["exact_fit"] = fit.exact_fit;
  j["descent_fallback"] = fit.descent_fallback;
  return j;
}

FitResult fit_result_from_json(const json& j) {
  FitResult fit;
  fit.B = matrix_from_json(j.at("B"));
  fit.Gamma = matrix_from_json(j.at("Gamma"));
  fit.Sigma = matrix_from_json(j.at("Sigma"));
  fit.sigma = j.at("sigma");
  fit.distances = vector_from_json(j.at("distances"));
  fit.weights = vector_from_json(j.at("weights"));
  fit.objective_trace = j.at("objective_trace").get<std::vector<double>>();
  fit.iterations = j.at("iterations");
  fit.converged = j.at("converged");
  fit.exact_fit = j.at("exact_fit");
  fit.descent_fallback = j.at("descent_fallback");
  return fit;
}

json simulation_report_to_json(const SimulationReport& report) {
  const Scenario& sc = report.scenario;
  json scenario;
  scenario["p"] = sc.p;
  scenario["q"] = sc.q;
  scenario["n"] = sc.n;
  scenario["reps"] = sc.reps;
  scenario["contamination_fraction"] = sc.contamination_fraction;
  scenario["x0"] = sc.x0;
  scenario["m_grid"] = sc.m_grid;
  scenario["seed"] = sc.seed;
  scenario["target_are"] = sc.target_are;
  scenario["b"] = sc.b;
  scenario["subsamples"] = sc.s_config.n_subsamples;
  json names = json::array();
  for (auto e : sc.estimators) names.push_back(estimator_name(e));
  scenario["estimators"] = std::move(names);

  json cells = json::array();
  for (const auto& c : report.cells) {
    json cell;
    cell["estimator"] = estimator_name(c.estimator);
    if (c.m)
      cell["m"] = *c.m;
    else
      cell["m"] = nullptr;
    cell["mse"] = c.mse;
    cell["tmse"] = c.tmse;
    cell["mse_se"] = c.mse_se;
    cell["reff"] = c.reff;
    cell["failures"] = c.failures;
    cells.push_back(std::move(cell));
  }

  json j;
  j["schema_version"] = kSchemaVersion;
  j["scenario"] = std::move(scenario);
  j["clean_mle_mse"] = report.clean_mle_mse;
  j["cells"] = std::move(cells);
  return j;
}

json cv_report_to_json(const CVReport& report) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["fold_of_row"] = report.fold_of_row;
  j["tau_c0"] = report.tau_c0;
  j["tau_c2"] = report.tau_c2;
  json ests = json::array();
  for (const auto& e : report.estimators) {
    json je;
    je["estimator"] = estimator_name(e.estimator);
    je["mse"] = vector_to_json(e.mse);
    je["tau_scale"] = vector_to_json(e.tau);
    ests.push_back(std::move(je));
  }
  j["estimators"] = std::move(ests);
  return j;
}

}  // namespace mmreg
