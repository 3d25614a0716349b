#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mmreg/mm_estimator.hpp"
#include "mmreg/s_estimator.hpp"
#include "mmreg/types.hpp"

namespace mmreg {

enum class EstimatorKind { MLE, S, MM };

std::string estimator_name(EstimatorKind k);

/// One Monte Carlo configuration: dimensions, replication budget and the
/// contamination pattern (a fraction of rows replaced by the identical
/// high-leverage point x0*e1 with response m*x0*e1).
struct Scenario {
  int p = 2;
  int q = 2;
  int n = 100;
  int reps = 500;
  double contamination_fraction = 0.0;
  double x0 = 10.0;
  std::vector<double> m_grid;  // required nonempty when contaminated
  std::uint64_t seed = 1;
  std::vector<EstimatorKind> estimators = {EstimatorKind::MLE, EstimatorKind::S,
                                           EstimatorKind::MM};
  double target_are = 0.90;
  double b = 0.5;
  double delta = 1e-4;
  int max_iters = 500;
  SConfig s_config;  // seed field ignored; per-replication streams are used
  int threads = 1;

  void validate() const;
};

/// Default grid used by the contamination study: 0, 0.4, ..., 5.6.
std::vector<double> default_m_grid();

/// One simulated dataset for replication rep_index: predictors and errors
/// standard normal (B0 = 0, Sigma0 = I), then the first
/// floor(contamination_fraction * n) rows replaced by the outlier. The
/// stream is derived from (sc.seed, rep_index), and the clean draws do not
/// depend on m, so datasets for different m share their clean part.
Dataset generate_sample(const Scenario& sc, std::uint64_t rep_index, double m);

/// Mean and trimmed mean of squared-error values: the trimmed mean keeps
/// the smallest ceil((1-trim)*K) values.
std::pair<double, double> mse_tmse(const std::vector<double>& errors,
                                   double trim);

/// Aggregate for one (estimator, m) pair. m is absent for a clean
/// scenario.
struct SimulationCell {
  EstimatorKind estimator;
  std::optional<double> m;
  double mse = 0.0;
  double tmse = 0.0;
  double mse_se = 0.0;
  double reff = 0.0;  // clean-case MLE MSE / this MSE
  int failures = 0;
};

struct SimulationReport {
  Scenario scenario;
  double clean_mle_mse = 0.0;  // baseline for REFF, from the same streams
  std::vector<SimulationCell> cells;
};

/// Run every (estimator, m) combination over sc.reps replications.
/// Replications execute on sc.threads threads with per-index substreams;
/// aggregation is by replication index, so the report does not depend on
/// scheduling. Individual fit failures are excluded and counted; more
/// than 1% failures in a cell is an error.
SimulationReport run_simulation(const Scenario& sc);

/// Long-format CSV: estimator,m,metric,value.
void write_simulation_csv(const SimulationReport& report, std::ostream& out);

/// Per-estimator, per-response-component prediction quality under a
/// seeded k-fold split: mean squared error and the tau-scale of the
/// prediction errors.
struct CVReport {
  std::vector<int> fold_of_row;
  struct EstimatorCV {
    EstimatorKind estimator;
    Vector mse;  // one entry per response component
    Vector tau;
  };
  std::vector<EstimatorCV> estimators;
  double tau_c0 = 0.0;  // q = 1 M-scale constant used by the tau criterion
  double tau_c2 = 0.0;  // rho2 constant (Gaussian efficiency 0.85)
};

CVReport cross_validate(const Dataset& data, int folds, const MMConfig& cfg,
                        const SConfig& s_cfg, std::uint64_t seed);

}  // namespace mmreg
