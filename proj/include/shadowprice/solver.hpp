#ifndef SHADOWPRICE_SOLVER_HPP
#define SHADOWPRICE_SOLVER_HPP

#include "shadowprice/nlp_core.hpp"
#include "shadowprice/orchard_model.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace shadowprice {

struct SolveOptions {
  int grid_n = 256;
  double tol_grad = 1e-12;
  int max_iter = 100;
  double backtrack_factor = 0.5;
  double min_step = 1e-16;

  void validate() const {
    if (grid_n < 2)
      throw std::invalid_argument("grid_n must be >= 2");
    if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
      throw std::invalid_argument("backtrack_factor must lie in (0, 1)");
    if (!(tol_grad > 0.0) || !(min_step > 0.0))
      throw std::invalid_argument("tolerances must be positive");
    if (max_iter < 0)
      throw std::invalid_argument("max_iter must be non-negative");
  }
};

struct KktSolution {
  FormulationVariant variant = FormulationVariant::V_17_18;
  RhsOffsets offsets;
  Decision decision;
  StateVector state;
  double objective = 0.0;
  MultiplierSet multipliers;
  double stationarity_residual_inf = 0.0;
  double constraint_residual_inf = 0.0;
  double gradient_inf = 0.0; // reduced gradient at the final iterate
  int iterations = 0;
  std::vector<double> objective_trace; // seed value, then each accepted step

  FullPoint point() const { return to_full_point(decision, state); }
};

class InfeasibleProblemError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class RankDeficiencyError : public std::runtime_error {
public:
  RankDeficiencyError(const std::string &what, int rank)
      : std::runtime_error(what), rank_(rank) {}
  int rank() const { return rank_; }

private:
  int rank_;
};

/// Newton did not reach tol_grad. Carries the best iterate, lifted and with
/// its multipliers and residuals filled in where they could be computed.
class NonConvergenceError : public std::runtime_error {
public:
  NonConvergenceError(const std::string &what, KktSolution best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const KktSolution &best() const { return best_; }

private:
  KktSolution best_;
};

struct GridOptimum {
  Decision decision;
  double value = 0.0;
};

/// Exhaustive argmax of the reduced objective over cell centres
/// ((i + 0.5)/n, (j + 0.5)/n); i indexes mu, j indexes s. Infeasible cells are
/// skipped; ties keep the lowest (i, j) in row-major order.
inline GridOptimum grid_argmax(FormulationVariant variant,
                               const RhsOffsets &offsets, int n) {
  if (n < 2)
    throw std::invalid_argument("grid resolution must be >= 2");
  const double h = 1.0 / n;
  bool found = false;
  GridOptimum best;
  best.value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double mu = (i + 0.5) * h;
    for (int j = 0; j < n; ++j) {
      const Decision d{mu, (j + 0.5) * h};
      const auto f = try_reduced_objective(variant, d, offsets);
      if (f && *f > best.value) {
        best = {d, *f};
        found = true;
      }
    }
  }
  if (!found)
    throw InfeasibleProblemError("no feasible grid point for variant " +
                                 std::string(variant_id(variant)));
  return best;
}

inline Decision grid_seed(FormulationVariant variant, const RhsOffsets &offsets,
                          int n) {
  return grid_argmax(variant, offsets, n).decision;
}

struct MultiplierRecovery {
  MultiplierSet multipliers;
  double residual_inf = 0.0;
};

/// Least-squares solution of grad U(z) = sum_j m_j grad g_j(z) over all six
/// stationarity rows. The residual is an optimality certificate: it vanishes
/// only where the system is consistent.
inline MultiplierRecovery recover_multipliers(const Problem &problem,
                                              const FullPoint &z) {
  if (!(z.c1() > 0.0) || !(z.c2() > 0.0))
    throw DomainError("multiplier recovery requires c1 > 0 and c2 > 0");
  const auto a = problem.constraint_jacobian_transpose(z);
  const Vector6 b = problem.objective_gradient(z);
  Eigen::ColPivHouseholderQR<Eigen::Matrix<double, kNumVariables, kNumEqualities>>
      qr(a);
  qr.setThreshold(1e-12);
  if (qr.rank() < kNumEqualities)
    throw RankDeficiencyError("constraint gradient matrix has rank " +
                                  std::to_string(qr.rank()) + " < 4",
                              static_cast<int>(qr.rank()));
  const Vector4 m = qr.solve(b);
  MultiplierRecovery out;
  out.multipliers = MultiplierSet::from_vector(m);
  out.residual_inf = (b - a * m).cwiseAbs().maxCoeff();
  return out;
}

namespace detail {

inline bool strictly_interior(FormulationVariant variant, Decision d,
                              const RhsOffsets &offsets) {
  if (!(d.mu > 0.0 && d.mu < 1.0 && d.s > 0.0 && d.s < 1.0))
    return false;
  const StateVector x = evaluate_chain(variant, d, offsets);
  return x.c1 > 0.0 && x.c2 > 0.0;
}

inline void lift(KktSolution &sol) {
  sol.state = evaluate_chain(sol.variant, sol.decision, sol.offsets);
  const Problem problem = with_offsets(build_problem(sol.variant), sol.offsets);
  const FullPoint z = sol.point();
  sol.objective = problem.objective(z);
  sol.constraint_residual_inf = residual_vector(problem, z).cwiseAbs().maxCoeff();
  const auto rec = recover_multipliers(problem, z);
  sol.multipliers = rec.multipliers;
  sol.stationarity_residual_inf =
      stationarity_residual(problem, z, rec.multipliers).cwiseAbs().maxCoeff();
}

} // namespace detail

/// Damped Newton ascent on the reduced objective from `start`.
///
/// Trial points leaving the box or making c1 or c2 non-positive are rejected
/// and the step is shortened. When the Hessian is not negative definite the
/// gradient is used as the search direction.
inline KktSolution solve_from(FormulationVariant variant,
                              const RhsOffsets &offsets, Decision start,
                              const SolveOptions &opts = {}) {
  opts.validate();
  if (!offsets.finite())
    throw std::invalid_argument("offsets must be finite");
  if (!detail::strictly_interior(variant, start, offsets))
    throw DomainError("Newton start point is not strictly interior");

  KktSolution sol;
  sol.variant = variant;
  sol.offsets = offsets;

  Decision x = start;
  double fx = reduced_objective(variant, x, offsets);
  auto der = reduced_gradient_hessian(variant, x, offsets);
  double gnorm = der.gradient.cwiseAbs().maxCoeff();
  sol.objective_trace.push_back(fx);

  // Once f stops resolving the improvement, a step that loses at most a few
  // ulps of f is accepted provided it reduces the gradient.
  const double ulp_slack = 8.0 * std::numeric_limits<double>::epsilon();

  int iter = 0;
  bool converged = gnorm <= opts.tol_grad;
  while (!converged && iter < opts.max_iter) {
    Eigen::Vector2d dir;
    Eigen::LLT<Eigen::Matrix2d> llt(-der.hessian);
    if (llt.info() == Eigen::Success) {
      dir = llt.solve(der.gradient);
    } else {
      dir = der.gradient;
    }
    const double slope = der.gradient.dot(dir);

    double t = 1.0;
    bool accepted = false;
    Decision trial;
    double f_trial = 0.0;
    ReducedDerivatives der_trial;
    while (t >= opts.min_step) {
      trial = {x.mu + t * dir[0], x.s + t * dir[1]};
      if (detail::strictly_interior(variant, trial, offsets)) {
        f_trial = reduced_objective(variant, trial, offsets);
        der_trial = reduced_gradient_hessian(variant, trial, offsets);
        const double g_trial = der_trial.gradient.cwiseAbs().maxCoeff();
        const bool armijo = f_trial >= fx + 1e-4 * t * slope;
        const bool flat = f_trial >= fx - ulp_slack * std::abs(fx) &&
                          g_trial < gnorm;
        if (armijo || flat) {
          accepted = true;
          break;
        }
      }
      t *= opts.backtrack_factor;
    }
    ++iter;
    if (!accepted)
      break;
    x = trial;
    fx = f_trial;
    der = der_trial;
    gnorm = der.gradient.cwiseAbs().maxCoeff();
    sol.objective_trace.push_back(fx);
    converged = gnorm <= opts.tol_grad;
  }

  sol.decision = x;
  sol.iterations = iter;
  sol.gradient_inf = gnorm;
  detail::lift(sol);
  if (!converged)
    throw NonConvergenceError(
        "Newton stopped after " + std::to_string(iter) +
            " iterations with gradient norm " + std::to_string(gnorm),
        std::move(sol));
  return sol;
}

/// Grid seed followed by damped Newton, lifted to the full point with
/// recovered multipliers.
inline KktSolution solve(FormulationVariant variant, const RhsOffsets &offsets,
                         const SolveOptions &opts = {}) {
  opts.validate();
  const Decision seed = grid_seed(variant, offsets, opts.grid_n);
  return solve_from(variant, offsets, seed, opts);
}

inline KktSolution solve(FormulationVariant variant,
                         const SolveOptions &opts = {}) {
  return solve(variant, RhsOffsets::zero(), opts);
}

/// Lagrangian partials for the (17), (18) system written out term by term,
/// with L = -sqrt(c1) - sqrt(c2) - lambda1[...] - xi1[...] - lambda2[...]
/// - xi2[...]. Order: mu, s, c1, c2, e1, e2.
inline Vector6 lagrangian_partials_17_18(const FullPoint &z,
                                         const MultiplierSet &m) {
  if (!(z.c1() > 0.0) || !(z.c2() > 0.0))
    throw DomainError("Lagrangian partials require c1 > 0 and c2 > 0");
  const double mu = z.mu(), s = z.s();
  Vector6 d;
  d[0] = 2.0 * m.lambda1 * mu + m.xi1 - m.lambda2 * (1.0 - z.e2()) * s -
         m.xi2 * s;
  d[1] = m.lambda1 * (1.0 - z.e1()) - m.lambda2 * (1.0 - z.e2()) * mu -
         m.xi2 * mu;
  d[2] = -1.0 / (2.0 * std::sqrt(z.c1())) + m.lambda1;
  d[3] = -1.0 / (2.0 * std::sqrt(z.c2())) + m.lambda2;
  d[4] = m.lambda1 * (1.0 - s) + m.xi1;
  d[5] = m.lambda2 * mu * s + m.xi2;
  return d;
}

/// Same partials from the generic stationarity form; the Lagrangian above is
/// the negated stationarity residual.
inline Vector6 lagrangian_partials(const Problem &problem, const FullPoint &z,
                                   const MultiplierSet &m) {
  return -stationarity_residual(problem, z, m);
}

struct FocReport {
  std::vector<std::pair<std::string, double>> entries;

  double max_abs() const {
    double out = 0.0;
    for (const auto &[name, value] : entries)
      out = std::max(out, std::abs(value));
    return out;
  }
  double at(std::string_view name) const {
    for (const auto &[n, value] : entries)
      if (n == name)
        return value;
    throw std::out_of_range("no FOC entry named " + std::string(name));
  }
};

/// Ten named residuals: six Lagrangian partials and four constraint residuals.
inline FocReport foc_report(const KktSolution &solution,
                            const MultiplierSet &multipliers) {
  const Problem problem =
      with_offsets(build_problem(solution.variant), solution.offsets);
  const FullPoint z = solution.point();
  const Vector6 partials =
      solution.variant == FormulationVariant::V_17_18
          ? lagrangian_partials_17_18(z, multipliers)
          : lagrangian_partials(problem, z, multipliers);
  const Vector4 res = residual_vector(problem, z);

  FocReport out;
  const auto &names = problem.variables().names();
  for (int i = 0; i < kNumVariables; ++i)
    out.entries.emplace_back("dL/d" + names[i], partials[i]);
  for (auto n : kConstraintOrder)
    out.entries.emplace_back(std::string(to_string(n)), res[index_of(n)]);
  return out;
}

inline FocReport foc_report(const KktSolution &solution) {
  return foc_report(solution, solution.multipliers);
}

} // namespace shadowprice

#endif // SHADOWPRICE_SOLVER_HPP
