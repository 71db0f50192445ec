#ifndef SHADOWPRICE_AUDIT_HPP
#define SHADOWPRICE_AUDIT_HPP

// Cost estimates formed as a ratio of shadow prices, compared against the
// marginal cost actually paid for the control at the optimum.

#include "shadowprice/sensitivity.hpp"
#include "shadowprice/solver.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace shadowprice {

inline constexpr double kDegenerateLambda = 1e-12;

/// x = -xi1 / lambda1, the consumption (in $) that offsets one ton of flies
/// added to the E1 equation.
inline double cost_estimate_x(const MultiplierSet &m) {
  if (!(m.lambda1 > kDegenerateLambda))
    throw std::domain_error("cost estimate undefined: lambda1 = " +
                            std::to_string(m.lambda1));
  return -m.xi1 / m.lambda1;
}

inline double cost_estimate_x(const KktSolution &solution) {
  return cost_estimate_x(solution.multipliers);
}

// Instance closed forms.
inline double treatment_cost(double mu) { return mu * mu; }
inline double flies_period1(double mu) { return 1.0 - mu; }

/// -g'(mu) / e1'(mu) with g = mu^2 and e1 = 1 - mu, i.e. 2 mu ($/ton).
inline double true_marginal_cost(double mu) { return -(2.0 * mu) / (-1.0); }

struct AuditRow {
  FormulationVariant variant = FormulationVariant::V_17_18;
  double cost_estimate_x = 0.0;
  double fd_cross_check = 0.0; // -(FD xi1)/(FD lambda1)
  double deviation = 0.0;      // cost_estimate_x - true marginal cost
};

struct AuditReport {
  std::array<AuditRow, 4> rows{};
  std::array<KktSolution, 4> solutions{};
  double true_marginal_cost = 0.0;
  double tol_grad = 0.0;
  double fd_eps = 0.0;
  double max_stationarity_residual = 0.0;
  double max_constraint_residual = 0.0;
};

/// Solves the four formulations at zero offsets and fills the rows in table
/// order (17)/(18), (17)/(18.a), (17.a)/(18), (17.a)/(18.a).
inline AuditReport table1(const SolveOptions &opts = {}, double fd_eps = 1e-3) {
  AuditReport report;
  report.tol_grad = opts.tol_grad;
  report.fd_eps = fd_eps;
  for (std::size_t k = 0; k < kAllVariants.size(); ++k) {
    const auto v = kAllVariants[k];
    KktSolution sol;
    try {
      sol = solve(v, RhsOffsets::zero(), opts);
    } catch (const std::exception &e) {
      throw std::runtime_error("table1: variant " + std::string(variant_id(v)) +
                               " failed: " + e.what());
    }
    const double fd_lambda1 =
        fd_shadow_price(v, ConstraintName::C1, fd_eps, opts).value;
    const double fd_xi1 =
        fd_shadow_price(v, ConstraintName::E1, fd_eps, opts).value;

    AuditRow &row = report.rows[k];
    row.variant = v;
    row.cost_estimate_x = cost_estimate_x(sol);
    row.fd_cross_check = -fd_xi1 / fd_lambda1;
    report.max_stationarity_residual =
        std::max(report.max_stationarity_residual, sol.stationarity_residual_inf);
    report.max_constraint_residual =
        std::max(report.max_constraint_residual, sol.constraint_residual_inf);
    report.solutions[k] = std::move(sol);
  }
  report.true_marginal_cost =
      true_marginal_cost(report.solutions[0].decision.mu);
  for (auto &row : report.rows)
    row.deviation = row.cost_estimate_x - report.true_marginal_cost;
  return report;
}

struct SurfaceRow {
  double mu = 0.0;
  double s = 0.0;
  double f = 0.0; // NaN where c1 < 0 or c2 < 0
};

/// f(mu, s) on the (n+1) x (n+1) lattice {i/n} x {j/n}; s is the outer index.
inline std::vector<SurfaceRow> surface_grid(int n) {
  if (n < 2)
    throw std::invalid_argument("surface resolution must be >= 2");
  std::vector<SurfaceRow> rows;
  rows.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    const double s = static_cast<double>(j) / n;
    for (int i = 0; i <= n; ++i) {
      const double mu = static_cast<double>(i) / n;
      const auto f = try_reduced_objective(FormulationVariant::V_17_18, {mu, s},
                                           RhsOffsets::zero());
      rows.push_back({mu, s, f ? *f : std::numeric_limits<double>::quiet_NaN()});
    }
  }
  return rows;
}

} // namespace shadowprice

#endif // SHADOWPRICE_AUDIT_HPP
