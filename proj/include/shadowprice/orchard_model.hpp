#ifndef SHADOWPRICE_ORCHARD_MODEL_HPP
#define SHADOWPRICE_ORCHARD_MODEL_HPP

// Two-period fruit storage instance.
//
// Controls: pesticide rate mu and saving ratio s, both in [0, 1].
// Instance constants: p1 = 1, sigma = 1, damage share d(e) = e, treatment
// cost g(mu) = mu^2. The compact constraint system is
//
//   C1: c1 = (1 - e1)(1 - s) - mu^2
//   E1: e1 = 1 - mu
//   C2: c2 = (1 - e2) mu s              or  (1 - e2)(1 - e1) s
//   E2: e2 = mu s                       or  (1 - e1) s
//
// and the objective is sqrt(c1) + sqrt(c2). With zero offsets 1 - e1 = mu, so
// the four C2/E2 choices describe the same problem; under perturbation they
// do not.

#include "shadowprice/nlp_core.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <string_view>

namespace shadowprice {

enum class FormulationVariant : int {
  V_17_18 = 0,   // C2 = (1-e2) mu s,        E2 = mu s
  V_17_18a = 1,  // C2 = (1-e2) mu s,        E2 = (1-e1) s
  V_17a_18 = 2,  // C2 = (1-e2)(1-e1) s,     E2 = mu s
  V_17a_18a = 3, // C2 = (1-e2)(1-e1) s,     E2 = (1-e1) s
};

inline constexpr std::array<FormulationVariant, 4> kAllVariants{
    FormulationVariant::V_17_18, FormulationVariant::V_17_18a,
    FormulationVariant::V_17a_18, FormulationVariant::V_17a_18a};

inline constexpr bool c2_uses_e1(FormulationVariant v) {
  return v == FormulationVariant::V_17a_18 ||
         v == FormulationVariant::V_17a_18a;
}
inline constexpr bool e2_uses_e1(FormulationVariant v) {
  return v == FormulationVariant::V_17_18a ||
         v == FormulationVariant::V_17a_18a;
}

inline std::string_view variant_id(FormulationVariant v) {
  switch (v) {
  case FormulationVariant::V_17_18: return "V_17_18";
  case FormulationVariant::V_17_18a: return "V_17_18a";
  case FormulationVariant::V_17a_18: return "V_17a_18";
  case FormulationVariant::V_17a_18a: return "V_17a_18a";
  }
  return "?";
}

/// Display label used in the formulation column of the cost table.
inline std::string_view variant_label(FormulationVariant v) {
  switch (v) {
  case FormulationVariant::V_17_18: return "(17), (18)";
  case FormulationVariant::V_17_18a: return "(17), (18.a)";
  case FormulationVariant::V_17a_18: return "(17.a), (18)";
  case FormulationVariant::V_17a_18a: return "(17.a), (18.a)";
  }
  return "?";
}

/// CLI letter: a..d in table order.
inline char variant_letter(FormulationVariant v) {
  return static_cast<char>('a' + static_cast<int>(v));
}

inline std::optional<FormulationVariant> variant_from_letter(char c) {
  if (c < 'a' || c > 'd')
    return std::nullopt;
  return static_cast<FormulationVariant>(c - 'a');
}

struct Decision {
  double mu = 0.0;
  double s = 0.0;
};

struct StateVector {
  double c1 = 0.0;
  double c2 = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  double p2 = 0.0; // informational, (1 - e1) s
};

/// Triangular forward evaluation E1 -> C1 -> E2 -> C2. Exact to rounding;
/// values may be negative.
inline StateVector evaluate_chain(FormulationVariant variant, Decision d,
                                  const RhsOffsets &offsets) {
  StateVector x;
  x.e1 = 1.0 - d.mu + offsets[ConstraintName::E1];
  const double kept = 1.0 - x.e1;
  x.c1 = kept * (1.0 - d.s) - d.mu * d.mu + offsets[ConstraintName::C1];
  x.p2 = kept * d.s;
  const double e2_base = e2_uses_e1(variant) ? kept : d.mu;
  x.e2 = e2_base * d.s + offsets[ConstraintName::E2];
  const double c2_base = c2_uses_e1(variant) ? kept : d.mu;
  x.c2 = (1.0 - x.e2) * c2_base * d.s + offsets[ConstraintName::C2];
  return x;
}

inline FullPoint to_full_point(Decision d, const StateVector &x) {
  FullPoint z;
  z[Var::Mu] = d.mu;
  z[Var::S] = d.s;
  z[Var::C1] = x.c1;
  z[Var::C2] = x.c2;
  z[Var::E1] = x.e1;
  z[Var::E2] = x.e2;
  z.p2 = x.p2;
  return z;
}

namespace detail {

inline Vector6 unit(Var v, double scale = 1.0) {
  Vector6 g = Vector6::Zero();
  g[static_cast<int>(v)] = scale;
  return g;
}

inline EqualityConstraint c1_constraint() {
  return {ConstraintName::C1,
          [](const FullPoint &z) {
            return z.c1() - ((1.0 - z.e1()) * (1.0 - z.s()) - z.mu() * z.mu());
          },
          [](const FullPoint &z) {
            Vector6 g = Vector6::Zero();
            g[static_cast<int>(Var::Mu)] = 2.0 * z.mu();
            g[static_cast<int>(Var::S)] = 1.0 - z.e1();
            g[static_cast<int>(Var::C1)] = 1.0;
            g[static_cast<int>(Var::E1)] = 1.0 - z.s();
            return g;
          },
          0.0};
}

inline EqualityConstraint e1_constraint() {
  return {ConstraintName::E1,
          [](const FullPoint &z) { return z.e1() - (1.0 - z.mu()); },
          [](const FullPoint &) { return Vector6(unit(Var::Mu) + unit(Var::E1)); },
          0.0};
}

inline EqualityConstraint c2_constraint(FormulationVariant v) {
  if (!c2_uses_e1(v)) {
    return {ConstraintName::C2,
            [](const FullPoint &z) {
              return z.c2() - (1.0 - z.e2()) * z.mu() * z.s();
            },
            [](const FullPoint &z) {
              Vector6 g = Vector6::Zero();
              g[static_cast<int>(Var::Mu)] = -(1.0 - z.e2()) * z.s();
              g[static_cast<int>(Var::S)] = -(1.0 - z.e2()) * z.mu();
              g[static_cast<int>(Var::C2)] = 1.0;
              g[static_cast<int>(Var::E2)] = z.mu() * z.s();
              return g;
            },
            0.0};
  }
  return {ConstraintName::C2,
          [](const FullPoint &z) {
            return z.c2() - (1.0 - z.e2()) * (1.0 - z.e1()) * z.s();
          },
          [](const FullPoint &z) {
            Vector6 g = Vector6::Zero();
            g[static_cast<int>(Var::S)] = -(1.0 - z.e2()) * (1.0 - z.e1());
            g[static_cast<int>(Var::C2)] = 1.0;
            g[static_cast<int>(Var::E1)] = (1.0 - z.e2()) * z.s();
            g[static_cast<int>(Var::E2)] = (1.0 - z.e1()) * z.s();
            return g;
          },
          0.0};
}

inline EqualityConstraint e2_constraint(FormulationVariant v) {
  if (!e2_uses_e1(v)) {
    return {ConstraintName::E2,
            [](const FullPoint &z) { return z.e2() - z.mu() * z.s(); },
            [](const FullPoint &z) {
              Vector6 g = unit(Var::E2);
              g[static_cast<int>(Var::Mu)] = -z.s();
              g[static_cast<int>(Var::S)] = -z.mu();
              return g;
            },
            0.0};
  }
  return {ConstraintName::E2,
          [](const FullPoint &z) { return z.e2() - (1.0 - z.e1()) * z.s(); },
          [](const FullPoint &z) {
            Vector6 g = unit(Var::E2);
            g[static_cast<int>(Var::S)] = -(1.0 - z.e1());
            g[static_cast<int>(Var::E1)] = z.s();
            return g;
          },
          0.0};
}

} // namespace detail

inline Problem build_problem(FormulationVariant variant) {
  auto objective = [](const FullPoint &z) {
    if (z.c1() < 0.0 || z.c2() < 0.0)
      throw DomainError("objective undefined for negative consumption");
    return std::sqrt(z.c1()) + std::sqrt(z.c2());
  };
  auto gradient = [](const FullPoint &z) {
    if (!(z.c1() > 0.0) || !(z.c2() > 0.0))
      throw DomainError("objective gradient requires c1 > 0 and c2 > 0");
    Vector6 g = Vector6::Zero();
    g[static_cast<int>(Var::C1)] = 0.5 / std::sqrt(z.c1());
    g[static_cast<int>(Var::C2)] = 0.5 / std::sqrt(z.c2());
    return g;
  };
  std::vector<InequalityConstraint> inequalities{
      {"mu >= 0", [](const FullPoint &z) { return z.mu(); }},
      {"mu <= 1", [](const FullPoint &z) { return 1.0 - z.mu(); }},
      {"s >= 0", [](const FullPoint &z) { return z.s(); }},
      {"s <= 1", [](const FullPoint &z) { return 1.0 - z.s(); }},
      {"mu(1-s) - mu^2 >= 0",
       [](const FullPoint &z) {
         return z.mu() * (1.0 - z.s()) - z.mu() * z.mu();
       }},
      {"c1 >= 0", [](const FullPoint &z) { return z.c1(); }},
      {"c2 >= 0", [](const FullPoint &z) { return z.c2(); }},
  };
  return Problem(objective, gradient,
                 {detail::c1_constraint(), detail::e1_constraint(),
                  detail::c2_constraint(variant),
                  detail::e2_constraint(variant)},
                 std::move(inequalities));
}

/// Zero-offset feasibility: box bounds and mu(1-s) - mu^2 >= 0.
inline bool is_feasible(Decision d) {
  if (!(d.mu >= 0.0 && d.mu <= 1.0 && d.s >= 0.0 && d.s <= 1.0))
    return false;
  return d.mu * (1.0 - d.s) - d.mu * d.mu >= 0.0;
}

/// Non-throwing reduced objective for grid scans: nullopt outside the box or
/// where the chain gives negative consumption.
inline std::optional<double> try_reduced_objective(FormulationVariant variant,
                                                   Decision d,
                                                   const RhsOffsets &offsets) {
  if (!(d.mu >= 0.0 && d.mu <= 1.0 && d.s >= 0.0 && d.s <= 1.0))
    return std::nullopt;
  const StateVector x = evaluate_chain(variant, d, offsets);
  if (x.c1 < 0.0 || x.c2 < 0.0)
    return std::nullopt;
  return std::sqrt(x.c1) + std::sqrt(x.c2);
}

/// f(mu, s) = sqrt(c1) + sqrt(c2) along the chain.
inline double reduced_objective(FormulationVariant variant, Decision d,
                                const RhsOffsets &offsets) {
  const StateVector x = evaluate_chain(variant, d, offsets);
  if (x.c1 < 0.0 || x.c2 < 0.0)
    throw DomainError("reduced objective undefined: c1 = " +
                      std::to_string(x.c1) + ", c2 = " + std::to_string(x.c2));
  return std::sqrt(x.c1) + std::sqrt(x.c2);
}

struct ReducedDerivatives {
  Eigen::Vector2d gradient;
  Eigen::Matrix2d hessian;
};

/// Analytic gradient and Hessian of the reduced objective in (mu, s).
///
/// Every variant writes E2 as u*s + r and C2 as (1 - e2)*v*s + r with
/// u, v in {mu, 1 - e1}. Since 1 - e1 = mu - r_E1, du/dmu = dv/dmu = 1 in all
/// cases, so one set of formulas covers the four variants.
inline ReducedDerivatives reduced_gradient_hessian(FormulationVariant variant,
                                                   Decision d,
                                                   const RhsOffsets &offsets) {
  const StateVector x = evaluate_chain(variant, d, offsets);
  if (!(x.c1 > 0.0) || !(x.c2 > 0.0))
    throw DomainError("reduced derivatives require c1 > 0 and c2 > 0");

  const double kept = 1.0 - x.e1;
  const double mu = d.mu;
  const double s = d.s;

  // c1 = kept (1 - s) - mu^2 + r
  const Eigen::Vector2d dc1(1.0 - s - 2.0 * mu, -kept);
  Eigen::Matrix2d hc1;
  hc1 << -2.0, -1.0, -1.0, 0.0;

  const double u = e2_uses_e1(variant) ? kept : mu;
  const double v = c2_uses_e1(variant) ? kept : mu;
  const Eigen::Vector2d de2(s, u);
  const Eigen::Vector2d dprod(s, v); // d(v s)
  Eigen::Matrix2d cross;
  cross << 0.0, 1.0, 1.0, 0.0; // d2(u s) = d2(v s)
  const double prod = v * s;

  // c2 = (1 - e2) prod + r
  const Eigen::Vector2d dc2 = -prod * de2 + (1.0 - x.e2) * dprod;
  const Eigen::Matrix2d hc2 = -prod * cross - de2 * dprod.transpose() -
                              dprod * de2.transpose() + (1.0 - x.e2) * cross;

  const double r1 = std::sqrt(x.c1);
  const double r2 = std::sqrt(x.c2);
  ReducedDerivatives out;
  out.gradient = dc1 / (2.0 * r1) + dc2 / (2.0 * r2);
  out.hessian = hc1 / (2.0 * r1) - dc1 * dc1.transpose() / (4.0 * x.c1 * r1) +
                hc2 / (2.0 * r2) - dc2 * dc2.transpose() / (4.0 * x.c2 * r2);
  return out;
}

} // namespace shadowprice

#endif // SHADOWPRICE_ORCHARD_MODEL_HPP
