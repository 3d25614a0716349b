#include "mmreg/s_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "mmreg/linalg.hpp"
#include "mmreg/scale.hpp"

namespace mmreg {

std::optional<SCandidate> elemental_fit(const Dataset& data,
                                        const std::vector<Index>& idx) {
  const Index m = data.p() + data.q() + 1;
  if (static_cast<Index>(idx.size()) != m)
    throw ContractViolation("elemental subsample must have p+q+1 rows");
  std::set<Index> seen(idx.begin(), idx.end());
  if (static_cast<Index>(seen.size()) != m || *seen.begin() < 0 ||
      *seen.rbegin() >= data.n())
    throw ContractViolation("elemental subsample indices must be distinct and in range");

  const Dataset sub = data.rows(idx);
  CoefMatrix B(data.p(), data.q());
  const Vector ones = Vector::Ones(m);
  try {
    for (Index j = 0; j < data.q(); ++j)
      B.col(j) = weighted_ls_column(sub.X(), sub.Y().col(j), ones);
  } catch (const RankDeficiencyError&) {
    return std::nullopt;
  }

  const Matrix U = residuals(sub, B);
  const Matrix C = U.transpose() * U;
  if (C.cwiseAbs().maxCoeff() == 0.0) {
    // Perfect interpolation on the subsample; the shape carries no
    // information, so use the identity (unit determinant).
    return SCandidate{std::move(B), Scatter(Matrix::Identity(data.q(), data.q())),
                      0.0};
  }
  try {
    return SCandidate{std::move(B), det_normalize(C), 0.0};
  } catch (const SingularScatterError&) {
    return std::nullopt;
  }
}

SCandidate concentration_step(const Dataset& data, const SCandidate& cand,
                              const RhoFunction& k0, double b) {
  const Matrix U = residuals(data, cand.B);
  const Vector d = mahalanobis_norms(U, cand.Gamma);
  const ScaleEstimate s = m_scale(d, k0, b);
  if (s.sigma == 0.0) return SCandidate{cand.B, cand.Gamma, 0.0};

  Vector w;
  k0.weights(d, s.sigma, w);
  if (w.maxCoeff() <= 0.0)
    throw NoSupportError("all concentration weights vanished (every distance beyond "
                         "saturation)");

  CoefMatrix B_new(data.p(), data.q());
  for (Index j = 0; j < data.q(); ++j)
    B_new.col(j) = weighted_ls_column(data.X(), data.Y().col(j), w);

  const Matrix U_new = residuals(data, B_new);
  const Matrix C = U_new.transpose() * (w.asDiagonal() * U_new);
  Scatter Gamma_new = det_normalize(C);
  const Vector d_new = mahalanobis_norms(U_new, Gamma_new);
  const double scale_new = m_scale(d_new, k0, b).sigma;
  return SCandidate{std::move(B_new), std::move(Gamma_new), scale_new};
}

namespace {

struct Finalist {
  double scale;
  int order;  // draw index, for deterministic tie-breaks
  SCandidate cand;
};

bool better(const Finalist& a, const Finalist& b) {
  return a.scale < b.scale || (a.scale == b.scale && a.order < b.order);
}

}  // namespace

SCandidate s_estimate(const Dataset& data, const SConfig& cfg,
                      const RhoFunction& k0) {
  if (cfg.n_subsamples < 1 || cfg.n_concentration < 0 || cfg.n_finalists < 1 ||
      cfg.max_refine_iters < 1)
    throw ContractViolation("invalid subsampling configuration");
  const Index m = data.p() + data.q() + 1;
  if (data.n() <= 2 * m)
    throw ContractViolation("subsampling needs n > 2(p+q+1), got n = " +
                            std::to_string(data.n()));

  Rng rng(cfg.seed);
  std::vector<Finalist> finalists;
  finalists.reserve(static_cast<std::size_t>(cfg.n_finalists) + 1);

  int found = 0;
  const long max_attempts = 10L * cfg.n_subsamples;
  for (long attempt = 0; attempt < max_attempts && found < cfg.n_subsamples;
       ++attempt) {
    const auto idx = rng.sample_without_replacement(data.n(), m);
    auto cand = elemental_fit(data, idx);
    if (!cand) continue;
    const int order = found++;

    cand->scale =
        m_scale(mahalanobis_norms(residuals(data, cand->B), cand->Gamma), k0, cfg.b)
            .sigma;
    try {
      for (int step = 0; step < cfg.n_concentration && cand->scale > 0.0; ++step)
        *cand = concentration_step(data, *cand, k0, cfg.b);
    } catch (const Error&) {
      continue;  // degenerate refinement path; drop the candidate
    }

    Finalist f{cand->scale, order, std::move(*cand)};
    auto pos = std::lower_bound(
        finalists.begin(), finalists.end(), f,
        [](const Finalist& a, const Finalist& b) { return better(a, b); });
    finalists.insert(pos, std::move(f));
    if (static_cast<int>(finalists.size()) > cfg.n_finalists) finalists.pop_back();
  }

  if (finalists.empty())
    throw DegenerateDataError("no nonsingular subsample found in " +
                              std::to_string(max_attempts) + " attempts");

  // Fully iterate the finalists; keep the smallest scale, breaking ties by
  // draw order so the result does not depend on scheduling.
  std::optional<Finalist> best;
  for (auto& f : finalists) {
    SCandidate cur = std::move(f.cand);
    double prev = cur.scale;
    try {
      for (int it = 0; it < cfg.max_refine_iters && cur.scale > 0.0; ++it) {
        SCandidate next = concentration_step(data, cur, k0, cfg.b);
        const double change = std::abs(next.scale - prev) / std::max(prev, 1e-300);
        cur = std::move(next);
        if (change < 1e-7) break;
        prev = cur.scale;
      }
    } catch (const Error&) {
      // keep the last good iterate
    }
    Finalist refined{cur.scale, f.order, std::move(cur)};
    if (!best || better(refined, *best)) best = std::move(refined);
  }
  return std::move(best->cand);
}

}  // namespace mmreg
