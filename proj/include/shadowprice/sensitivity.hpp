#ifndef SHADOWPRICE_SENSITIVITY_HPP
#define SHADOWPRICE_SENSITIVITY_HPP

// Shadow prices checked by re-solving perturbed problems.

#include "shadowprice/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace shadowprice {

/// Central difference of the optimal value with respect to one rhs offset.
struct FdEstimate {
  ConstraintName name = ConstraintName::C1;
  double eps = 0.0;
  double value = 0.0;   // (v_plus - v_minus) / (2 eps)
  double v_plus = 0.0;  // V*(r_name = +eps)
  double v_minus = 0.0; // V*(r_name = -eps)
};

inline FdEstimate fd_shadow_price(FormulationVariant variant,
                                  ConstraintName name, double eps,
                                  const SolveOptions &opts = {}) {
  if (!(eps >= 1e-6 && eps <= 1e-2))
    throw std::invalid_argument("fd step must lie in [1e-6, 1e-2], got " +
                                std::to_string(eps));
  FdEstimate out;
  out.name = name;
  out.eps = eps;
  out.v_plus = solve(variant, RhsOffsets::single(name, eps), opts).objective;
  out.v_minus = solve(variant, RhsOffsets::single(name, -eps), opts).objective;
  out.value = (out.v_plus - out.v_minus) / (2.0 * eps);
  return out;
}

/// Richardson extrapolation of two central differences. Truncation error is
/// O(eps^2), so with ratio q = coarse/fine the combination
/// (q^2 D_fine - D_coarse)/(q^2 - 1) cancels the leading term.
inline double richardson_shadow_price(FormulationVariant variant,
                                      ConstraintName name,
                                      double eps_coarse = 1e-2,
                                      double eps_fine = 1e-3,
                                      const SolveOptions &opts = {}) {
  if (!(eps_coarse > eps_fine))
    throw std::invalid_argument("coarse step must exceed fine step");
  const double coarse = fd_shadow_price(variant, name, eps_coarse, opts).value;
  const double fine = fd_shadow_price(variant, name, eps_fine, opts).value;
  const double q2 = (eps_coarse / eps_fine) * (eps_coarse / eps_fine);
  return (q2 * fine - coarse) / (q2 - 1.0);
}

/// Change in the optimal value when one unit of flies (scaled by delta) is
/// added to E1 and x*delta units of consumption to C1. Both values come from
/// fresh solves with the same options.
inline double compensation_delta(FormulationVariant variant, double x,
                                 double delta, const SolveOptions &opts = {}) {
  if (!std::isfinite(x) || !std::isfinite(delta))
    throw std::invalid_argument("compensation inputs must be finite");
  RhsOffsets joint;
  joint[ConstraintName::E1] = delta;
  joint[ConstraintName::C1] = x * delta;
  const double base = solve(variant, RhsOffsets::zero(), opts).objective;
  const double perturbed = solve(variant, joint, opts).objective;
  return perturbed - base;
}

struct CompensationPoint {
  double delta = 0.0;
  double delta_v = 0.0;
  double scaled = 0.0; // |delta_v| / delta^2
};

struct CompensationSweep {
  double x = 0.0;
  std::vector<CompensationPoint> points;
  double gamma = 0.0; // largest |delta_v| / delta^2 over the sweep

  /// Ratios between successive scaled values.
  std::vector<double> decay_ratios() const {
    std::vector<double> out;
    for (std::size_t k = 1; k < points.size(); ++k)
      out.push_back(points[k].scaled / points[k - 1].scaled);
    return out;
  }

  /// Scaled values stay bounded: successive ratios lie in [lo, hi], or every
  /// |delta_v| is at rounding level, in which case the ratios are 0/0.
  bool decays_quadratically(double lo = 0.25, double hi = 4.0,
                            double noise = 1e-14) const {
    const bool vanishing = std::all_of(points.begin(), points.end(),
                                       [&](const CompensationPoint &p) {
                                         return std::abs(p.delta_v) <= noise;
                                       });
    if (vanishing)
      return true;
    const auto ratios = decay_ratios();
    return std::all_of(ratios.begin(), ratios.end(),
                       [&](double r) { return r >= lo && r <= hi; });
  }
};

inline CompensationSweep compensation_sweep(FormulationVariant variant, double x,
                                            const std::vector<double> &deltas,
                                            const SolveOptions &opts = {}) {
  CompensationSweep out;
  out.x = x;
  for (double d : deltas) {
    if (!(d > 0.0))
      throw std::invalid_argument("sweep deltas must be positive");
    CompensationPoint p;
    p.delta = d;
    p.delta_v = compensation_delta(variant, x, d, opts);
    p.scaled = std::abs(p.delta_v) / (d * d);
    out.gamma = std::max(out.gamma, p.scaled);
    out.points.push_back(p);
  }
  return out;
}

/// Exhaustive cell-centred grid argmax; shares tie-breaking with grid_seed.
inline GridOptimum brute_force_optimum(FormulationVariant variant,
                                       const RhsOffsets &offsets, int n) {
  return grid_argmax(variant, offsets, n);
}

} // namespace shadowprice

#endif // SHADOWPRICE_SENSITIVITY_HPP
