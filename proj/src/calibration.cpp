#include "mmreg/calibration.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "mmreg/chi.hpp"
#include "mmreg/errors.hpp"

namespace mmreg {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

// E f(v) for v ~ chi_q when f is constant equal to f_tail beyond v_max;
// the tail mass comes from the chi-squared survival function so the
// panels never straddle the saturation kink.
double chi_expectation(const std::function<double(double)>& f, int q, double v_max,
                       double f_tail) {
  const double body = GK::integrate(
      [&](double v) { return f(v) * chi_pdf(v, q); }, 0.0, v_max, 12, 1e-12);
  return body + f_tail * chi2_survival(v_max * v_max, static_cast<double>(q));
}

double wstar(const RhoFunction& k, int q, double sigma0, double v) {
  const double s = v / sigma0;
  return k.weight(s) + 2.0 / static_cast<double>(q) * k.w1_prime(s * s) * s * s;
}

}  // namespace

double expected_rho(double c, int q) {
  if (!(c > 0.0)) throw ContractViolation("expected_rho needs c > 0");
  if (q < 1) throw ContractViolation("expected_rho needs q >= 1");
  const Bisquare k(c);
  // rho saturates at 1 beyond c; keep the kink out of the panels.
  return chi_expectation([&](double v) { return k.rho(v); }, q, c, 1.0);
}

double solve_c0(int q, double b) {
  if (!(b > 0.0 && b < 1.0)) throw ContractViolation("solve_c0 needs b in (0,1)");
  double lo = 0.25, hi = 4.0;
  while (expected_rho(lo, q) < b) lo *= 0.5;
  while (expected_rho(hi, q) > b) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-9; ++it) {
    const double mid = 0.5 * (lo + hi);
    // expected_rho is strictly decreasing in c.
    (expected_rho(mid, q) > b ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double e_psi_sq(const RhoFunction& k, int q, double sigma0) {
  const double v_max = k.c() * sigma0;
  return chi_expectation(
      [&](double v) { const double s = v / sigma0; const double ps = k.psi(s); return ps * ps; },
      q, v_max, 0.0);
}

double e_wstar(const RhoFunction& k, int q, double sigma0) {
  const double v_max = k.c() * sigma0;
  return chi_expectation([&](double v) { return wstar(k, q, sigma0, v); }, q, v_max,
                         0.0);
}

double are(double c1, int q) {
  if (!(c1 > 0.0)) throw ContractViolation("are needs c1 > 0");
  const Bisquare k(c1);
  const double denom = e_psi_sq(k, q);
  if (!(denom > 1e-300))
    throw DegenerateKernelError("E psi^2 vanishes for c1 = " + std::to_string(c1));
  const double num = e_wstar(k, q);
  return static_cast<double>(q) * num * num / denom;
}

double solve_c1(int q, double target) {
  if (!(target > 0.0 && target < 1.0))
    throw ContractViolation("solve_c1 needs a target efficiency in (0,1)");
  // are is increasing in c1 over the relevant range and tends to 1.
  double lo = 1.0, hi = 8.0;
  while (are(lo, q) > target) lo *= 0.5;
  while (are(hi, q) < target) {
    hi *= 2.0;
    if (hi > 1e6)
      throw DegenerateKernelError("target efficiency " + std::to_string(target) +
                                  " not attainable");
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double f = are(mid, q) - target;
    if (std::abs(f) <= 1e-7) break;
    (f < 0.0 ? lo : hi) = mid;
    if (hi - lo <= 1e-12 * mid) break;
  }
  return mid;
}

CalibrationResult calibrate(int q, double target_are, double b) {
  CalibrationResult r;
  r.q = q;
  r.b = b;
  r.target_are = target_are;
  r.c0 = solve_c0(q, b);
  r.c1 = solve_c1(q, target_are);
  r.achieved_are = are(r.c1, q);
  if (!(r.c0 < r.c1))
    throw Error("calibration",
                "efficiency target " + std::to_string(target_are) +
                    " yields c1 <= c0; pick a higher target");
  return r;
}

double tau_rho2_constant(double target_eff, double b) {
  if (!(target_eff > 0.0 && target_eff < 1.0))
    throw ContractViolation("tau_rho2_constant needs a target in (0,1)");
  const double c0 = solve_c0(1, b);
  const Bisquare k0(c0);

  // Asymptotic variance of the tau-scale at the standard normal via its
  // influence function; the Gaussian-MLE scale has relative variance 1/2.
  const auto efficiency = [&](double c2) {
    const Bisquare k2(c2);
    const double A0 = expected_rho(c2, 1);
    const double D0 = chi_expectation([&](double v) { return k0.psi(v) * v; }, 1, c0, 0.0);
    const double D2 = chi_expectation([&](double v) { return k2.psi(v) * v; }, 1, c2, 0.0);
    const double v_max = std::max(c0, c2);
    const auto if_tau2 = [&](double v) {
      return (k2.rho(v) - A0) + (2.0 * A0 - D2) * (k0.rho(v) - b) / D0;
    };
    const double tail = if_tau2(v_max + 1.0);  // constant beyond both constants
    const double e_if2 =
        chi_expectation([&](double v) { return if_tau2(v) * if_tau2(v); }, 1, v_max,
                        tail * tail);
    const double avar_rel = e_if2 / (4.0 * A0 * A0);
    return 0.5 / avar_rel;
  };

  double lo = 1.2, hi = 8.0;
  while (efficiency(lo) > target_eff) lo *= 0.5;
  while (efficiency(hi) < target_eff) hi *= 2.0;
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double f = efficiency(mid) - target_eff;
    if (std::abs(f) <= 1e-8) break;
    (f < 0.0 ? lo : hi) = mid;
    if (hi - lo <= 1e-12 * mid) break;
  }
  return mid;
}

const ConstantsTable& ConstantsTable::builtin() {
  static const ConstantsTable table = [] {
    ConstantsTable t;
    t.c0_entries = {
        {1, 0.5, 1.5476449809}, {2, 0.5, 2.6608033929}, {3, 0.5, 3.4528816505},
        {4, 0.5, 4.0965621661}, {5, 0.5, 4.6520233412}, {10, 0.5, 6.7758211751},
    };
    t.c1_entries = {
        {1, 0.80, 3.1369086633},  {2, 0.80, 3.5100641464}, {3, 0.80, 3.8235355836},
        {4, 0.80, 4.0975658337},  {5, 0.80, 4.3432674135}, {10, 0.80, 5.3219125256},
        {1, 0.90, 3.8826615762},  {2, 0.90, 4.2821016372}, {3, 0.90, 4.6175427172},
        {4, 0.90, 4.9104421655},  {5, 0.90, 5.1726737310}, {10, 0.90, 6.2124270291},
        {1, 0.95, 4.6850649485},  {2, 0.95, 5.1229860899}, {3, 0.95, 5.4902492084},
        {4, 0.95, 5.8103155871},  {5, 0.95, 6.0962664688}, {10, 0.95, 7.2235407843},
    };
    return t;
  }();
  return table;
}

ConstantsTable ConstantsTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open constants file: " + path);
  ConstantsTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string kind;
    int q = 0;
    double level = 0.0, value = 0.0;
    if (!(ss >> kind >> q >> level >> value))
      throw DataError("constants file " + path + ": malformed line " +
                      std::to_string(line_no));
    if (kind == "c0")
      t.c0_entries.push_back({q, level, value});
    else if (kind == "c1")
      t.c1_entries.push_back({q, level, value});
    else
      throw DataError("constants file " + path + ": unknown kind '" + kind + "'");
  }
  return t;
}

void ConstantsTable::save(std::ostream& out) const {
  out << "# bisquare tuning constants\n";
  out << "# c0 <q> <b> <value>: scale kernel constant at level b\n";
  out << "# c1 <q> <target_efficiency> <value>: efficiency kernel constant\n";
  char buf[96];
  for (const auto& e : c0_entries) {
    std::snprintf(buf, sizeof buf, "c0 %d %.2f %.10f\n", e.q, e.b, e.value);
    out << buf;
  }
  for (const auto& e : c1_entries) {
    std::snprintf(buf, sizeof buf, "c1 %d %.2f %.10f\n", e.q, e.target_are, e.value);
    out << buf;
  }
}

std::optional<double> ConstantsTable::c0(int q, double b) const {
  for (const auto& e : c0_entries)
    if (e.q == q && std::abs(e.b - b) <= 1e-9) return e.value;
  return std::nullopt;
}

std::optional<double> ConstantsTable::c1(int q, double target_are) const {
  for (const auto& e : c1_entries)
    if (e.q == q && std::abs(e.target_are - target_are) <= 1e-9) return e.value;
  return std::nullopt;
}

double ConstantsTable::c0_or_solve(int q, double b) const {
  if (const auto v = c0(q, b)) return *v;
  return solve_c0(q, b);
}

double ConstantsTable::c1_or_solve(int q, double target_are) const {
  if (const auto v = c1(q, target_are)) return *v;
  return solve_c1(q, target_are);
}

ConstantsTable ConstantsTable::regenerate() {
  ConstantsTable t;
  for (int q : {1, 2, 3, 4, 5, 10}) t.c0_entries.push_back({q, 0.5, solve_c0(q, 0.5)});
  for (double e : {0.80, 0.90, 0.95})
    for (int q : {1, 2, 3, 4, 5, 10}) t.c1_entries.push_back({q, e, solve_c1(q, e)});
  return t;
}

}  // namespace mmreg
