#include "mmreg/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <thread>

#include "mmreg/calibration.hpp"
#include "mmreg/linalg.hpp"
#include "mmreg/rng.hpp"
#include "mmreg/scale.hpp"

namespace mmreg {

std::string estimator_name(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::MLE: return "MLE";
    case EstimatorKind::S: return "S";
    case EstimatorKind::MM: return "MM";
  }
  return "?";
}

void Scenario::validate() const {
  if (p < 1 || q < 1 || n < p + q || reps < 1)
    throw ContractViolation("scenario dimensions invalid");
  if (!(contamination_fraction >= 0.0 && contamination_fraction < 0.5))
    throw ContractViolation("contamination fraction must be in [0, 0.5)");
  if (contamination_fraction > 0.0 && m_grid.empty())
    throw ContractViolation("contaminated scenario needs a nonempty m grid");
  if (estimators.empty()) throw ContractViolation("no estimators selected");
  if (threads < 1) throw ContractViolation("threads must be >= 1");
  if (!(target_are > 0.0 && target_are < 1.0) || !(b > 0.0 && b < 1.0))
    throw ContractViolation("efficiency target and b must be in (0,1)");
}

std::vector<double> default_m_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 14; ++i) g.push_back(0.4 * i);
  return g;
}

namespace {

Dataset generate_impl(const Scenario& sc, std::uint64_t rep_index, double m,
                      Index n_outliers) {
  Rng rng = Rng::stream(sc.seed, rep_index);
  Matrix X(sc.n, sc.p);
  Matrix Y(sc.n, sc.q);
  // Row by row: p predictor normals then q error normals, so the clean
  // draws are identical for every contamination slope m.
  for (Index i = 0; i < sc.n; ++i) {
    for (Index j = 0; j < sc.p; ++j) X(i, j) = rng.normal();
    for (Index j = 0; j < sc.q; ++j) Y(i, j) = rng.normal();  // B0 = 0
  }
  for (Index i = 0; i < n_outliers; ++i) {
    X.row(i).setZero();
    Y.row(i).setZero();
    X(i, 0) = sc.x0;
    Y(i, 0) = m * sc.x0;
  }
  return Dataset(std::move(X), std::move(Y));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t rep, std::uint64_t m_idx) {
  std::uint64_t state = seed ^ (0xa076'1d64'78bd'642fULL + rep);
  (void)splitmix64(state);
  state ^= 0xe703'7ed1'a0b4'28dbULL * (m_idx + 1);
  return splitmix64(state);
}

double frobenius_sq(const Matrix& m) { return m.squaredNorm(); }

struct CellStore {
  EstimatorKind estimator;
  std::optional<double> m;
  std::size_t m_idx;
  std::vector<double> values;  // per replication, NaN = failure
};

}  // namespace

Dataset generate_sample(const Scenario& sc, std::uint64_t rep_index, double m) {
  const auto k = static_cast<Index>(std::floor(
      sc.contamination_fraction * static_cast<double>(sc.n)));
  return generate_impl(sc, rep_index, m, k);
}

std::pair<double, double> mse_tmse(const std::vector<double>& errors, double trim) {
  if (errors.empty()) throw ContractViolation("mse_tmse needs a nonempty list");
  if (!(trim >= 0.0 && trim < 1.0))
    throw ContractViolation("trim fraction must be in [0,1)");
  for (double e : errors)
    if (!(e >= 0.0) || !std::isfinite(e))
      throw ContractViolation("error values must be nonnegative and finite");

  const double mean =
      std::accumulate(errors.begin(), errors.end(), 0.0) / errors.size();
  std::vector<double> sorted = errors;
  std::sort(sorted.begin(), sorted.end());
  const auto keep = static_cast<std::size_t>(
      std::ceil((1.0 - trim) * static_cast<double>(sorted.size())));
  const double tmean =
      std::accumulate(sorted.begin(), sorted.begin() + keep, 0.0) / keep;
  return {mean, tmean};
}

SimulationReport run_simulation(const Scenario& sc) {
  sc.validate();
  const bool contaminated = sc.contamination_fraction > 0.0;
  const std::vector<double> ms = contaminated ? sc.m_grid : std::vector<double>{0.0};

  const auto& table = ConstantsTable::builtin();
  const double c0 = table.c0_or_solve(sc.q, sc.b);
  const double c1 = table.c1_or_solve(sc.q, sc.target_are);
  MMConfig mm_cfg;
  mm_cfg.b = sc.b;
  mm_cfg.c0 = c0;
  mm_cfg.c1 = c1;
  mm_cfg.delta = sc.delta;
  mm_cfg.max_iters = sc.max_iters;
  mm_cfg.validate();
  const Bisquare k0(c0);

  const bool need_s =
      std::find(sc.estimators.begin(), sc.estimators.end(), EstimatorKind::S) !=
          sc.estimators.end() ||
      std::find(sc.estimators.begin(), sc.estimators.end(), EstimatorKind::MM) !=
          sc.estimators.end();

  std::vector<CellStore> cells;
  for (std::size_t mi = 0; mi < ms.size(); ++mi)
    for (EstimatorKind est : sc.estimators) {
      CellStore cs;
      cs.estimator = est;
      cs.m = contaminated ? std::optional<double>(ms[mi]) : std::nullopt;
      cs.m_idx = mi;
      cs.values.assign(static_cast<std::size_t>(sc.reps),
                       std::numeric_limits<double>::quiet_NaN());
      cells.push_back(std::move(cs));
    }
  std::vector<double> baseline(static_cast<std::size_t>(sc.reps),
                               std::numeric_limits<double>::quiet_NaN());

  const auto run_rep = [&](int rep) {
    const auto r = static_cast<std::size_t>(rep);
    const auto urep = static_cast<std::uint64_t>(rep);
    const Dataset clean = generate_impl(sc, urep, 0.0, 0);
    try {
      baseline[r] = frobenius_sq(mle_fit(clean).B);
    } catch (const Error&) {
    }

    for (std::size_t mi = 0; mi < ms.size(); ++mi) {
      const Dataset* d = &clean;
      std::optional<Dataset> contaminated_data;
      if (contaminated) {
        contaminated_data = generate_sample(sc, urep, ms[mi]);
        d = &*contaminated_data;
      }

      std::optional<SCandidate> s_cand;
      if (need_s) {
        SConfig s_cfg = sc.s_config;
        s_cfg.b = sc.b;
        s_cfg.seed = derive_seed(sc.seed, urep, mi);
        try {
          s_cand = s_estimate(*d, s_cfg, k0);
        } catch (const Error&) {
        }
      }

      for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        CellStore& cell = cells[ci];
        if (cell.m_idx != mi) continue;
        try {
          switch (cell.estimator) {
            case EstimatorKind::MLE:
              cell.values[r] = frobenius_sq(mle_fit(*d).B);
              break;
            case EstimatorKind::S:
              if (!s_cand) throw DegenerateDataError("no S candidate");
              cell.values[r] = frobenius_sq(s_cand->B);
              break;
            case EstimatorKind::MM:
              if (!s_cand) throw DegenerateDataError("no S candidate");
              cell.values[r] = frobenius_sq(mm_fit(*d, mm_cfg, *s_cand).B);
              break;
          }
        } catch (const Error&) {
        }
      }
    }
  };

  const int n_threads = std::min(sc.threads, sc.reps);
  if (n_threads <= 1) {
    for (int rep = 0; rep < sc.reps; ++rep) run_rep(rep);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back([&, t] {
        for (int rep = t; rep < sc.reps; rep += n_threads) run_rep(rep);
      });
    for (auto& th : pool) th.join();
  }

  SimulationReport report;
  report.scenario = sc;

  std::vector<double> base_ok;
  base_ok.reserve(baseline.size());
  for (double v : baseline)
    if (std::isfinite(v)) base_ok.push_back(v);
  if (base_ok.size() < baseline.size() * 99 / 100 || base_ok.empty())
    throw Error("simulation", "clean MLE baseline failed too often");
  report.clean_mle_mse =
      std::accumulate(base_ok.begin(), base_ok.end(), 0.0) / base_ok.size();

  for (const CellStore& cs : cells) {
    std::vector<double> ok;
    ok.reserve(cs.values.size());
    for (double v : cs.values)
      if (std::isfinite(v)) ok.push_back(v);
    const int failures = static_cast<int>(cs.values.size() - ok.size());
    if (static_cast<double>(failures) >= 0.01 * static_cast<double>(sc.reps))
      throw Error("simulation",
                  estimator_name(cs.estimator) + " failed on " +
                      std::to_string(failures) + "/" + std::to_string(sc.reps) +
                      " replications");

    SimulationCell cell;
    cell.estimator = cs.estimator;
    cell.m = cs.m;
    cell.failures = failures;
    const auto [mse, tmse] = mse_tmse(ok, 0.10);
    cell.mse = mse;
    cell.tmse = tmse;
    if (ok.size() > 1) {
      double var = 0.0;
      for (double v : ok) var += (v - mse) * (v - mse);
      var /= static_cast<double>(ok.size() - 1);
      cell.mse_se = std::sqrt(var / static_cast<double>(ok.size()));
    }
    cell.reff = report.clean_mle_mse / cell.mse;
    report.cells.push_back(std::move(cell));
  }
  return report;
}

void write_simulation_csv(const SimulationReport& report, std::ostream& out) {
  out << "estimator,m,metric,value\n";
  char buf[96];
  const auto emit = [&](const SimulationCell& c, const char* metric, double value) {
    if (c.m)
      std::snprintf(buf, sizeof buf, "%s,%.17g,%s,%.17g\n",
                    estimator_name(c.estimator).c_str(), *c.m, metric, value);
    else
      std::snprintf(buf, sizeof buf, "%s,,%s,%.17g\n",
                    estimator_name(c.estimator).c_str(), metric, value);
    out << buf;
  };
  for (const auto& c : report.cells) {
    emit(c, "mse", c.mse);
    emit(c, "tmse", c.tmse);
    emit(c, "mse_se", c.mse_se);
    emit(c, "reff", c.reff);
  }
}

CVReport cross_validate(const Dataset& data, int folds, const MMConfig& cfg,
                        const SConfig& s_cfg, std::uint64_t seed) {
  if (folds < 2) throw ContractViolation("cross-validation needs folds >= 2");
  if (data.n() < 2 * folds)
    throw ContractViolation("cross-validation needs n >= 2*folds");
  cfg.validate();

  const Index n = data.n();
  const Index q = data.q();

  Rng rng(seed);
  const auto perm = rng.sample_without_replacement(n, n);
  std::vector<int> fold_of_row(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    fold_of_row[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] =
        static_cast<int>(i % folds);

  Matrix err_mle(n, q), err_mm(n, q);
  const Bisquare k0(cfg.c0);

  for (int f = 0; f < folds; ++f) {
    std::vector<Index> train, test;
    for (Index i = 0; i < n; ++i)
      (fold_of_row[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);

    const Dataset train_data = data.rows(train);
    const FitResult mle = mle_fit(train_data);

    SConfig fold_cfg = s_cfg;
    fold_cfg.b = cfg.b;
    fold_cfg.seed = derive_seed(seed, static_cast<std::uint64_t>(f), 0);
    const SCandidate init = s_estimate(train_data, fold_cfg, k0);
    const FitResult mm = mm_fit(train_data, cfg, init);

    for (Index i : test) {
      const Vector x = data.X().row(i).transpose();
      const Vector y = data.Y().row(i).transpose();
      err_mle.row(i) = (y - mle.B.transpose() * x).transpose();
      err_mm.row(i) = (y - mm.B.transpose() * x).transpose();
    }
  }

  CVReport report;
  report.fold_of_row = std::move(fold_of_row);
  report.tau_c0 = ConstantsTable::builtin().c0_or_solve(1, cfg.b);
  report.tau_c2 = tau_rho2_constant(0.85, cfg.b);
  const Bisquare tk0(report.tau_c0);
  const Bisquare tk2(report.tau_c2);

  const auto summarize = [&](EstimatorKind kind, const Matrix& err) {
    CVReport::EstimatorCV s;
    s.estimator = kind;
    s.mse.resize(q);
    s.tau.resize(q);
    for (Index j = 0; j < q; ++j) {
      s.mse[j] = err.col(j).squaredNorm() / static_cast<double>(n);
      const Vector abs_err = err.col(j).cwiseAbs();
      s.tau[j] = tau_scale(abs_err, tk0, tk2, cfg.b);
    }
    return s;
  };
  report.estimators.push_back(summarize(EstimatorKind::MLE, err_mle));
  report.estimators.push_back(summarize(EstimatorKind::MM, err_mm));
  return report;
}

}  // namespace mmreg
