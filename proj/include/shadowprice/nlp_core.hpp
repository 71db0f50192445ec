#ifndef SHADOWPRICE_NLP_CORE_HPP
#define SHADOWPRICE_NLP_CORE_HPP

// Small dense equality-constrained maximization problems with right-hand-side
// perturbations. Every equality is stored as
//
//     g_j(z) = r_j,   g_j = (defined variable) - (defining expression),
//
// so the multiplier m_j that solves  grad U = sum_j m_j grad g_j  is the
// shadow price dV*/dr_j of adding one unit to the j-th right-hand side.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace shadowprice {

inline constexpr int kNumVariables = 6;
inline constexpr int kNumEqualities = 4;

using Vector6 = Eigen::Matrix<double, kNumVariables, 1>;
using Vector4 = Eigen::Matrix<double, kNumEqualities, 1>;

/// Raised when an evaluator leaves the domain of the square roots in the
/// objective (c1 < 0 or c2 < 0, or <= 0 where derivatives are needed).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Ordered, named scalar variables. For the orchard instance the order is
/// (mu, s, c1, c2, e1, e2).
class VariableSpace {
public:
  VariableSpace(std::initializer_list<std::string> names) : names_(names) {
    for (std::size_t i = 0; i < names_.size(); ++i)
      for (std::size_t j = i + 1; j < names_.size(); ++j)
        if (names_[i] == names_[j])
          throw std::invalid_argument("duplicate variable name: " + names_[i]);
  }

  static const VariableSpace &orchard() {
    static const VariableSpace space{"mu", "s", "c1", "c2", "e1", "e2"};
    return space;
  }

  std::size_t size() const { return names_.size(); }
  const std::string &name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string> &names() const { return names_; }

  std::size_t index(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name)
        return i;
    throw std::invalid_argument("unknown variable: " + std::string(name));
  }

private:
  std::vector<std::string> names_;
};

enum class Var : int { Mu = 0, S = 1, C1 = 2, C2 = 3, E1 = 4, E2 = 5 };

/// z = (mu, s, c1, c2, e1, e2), plus the informational period-2 product p2.
struct FullPoint {
  Vector6 z = Vector6::Zero();
  std::optional<double> p2;

  double operator[](Var v) const { return z[static_cast<int>(v)]; }
  double &operator[](Var v) { return z[static_cast<int>(v)]; }

  double mu() const { return (*this)[Var::Mu]; }
  double s() const { return (*this)[Var::S]; }
  double c1() const { return (*this)[Var::C1]; }
  double c2() const { return (*this)[Var::C2]; }
  double e1() const { return (*this)[Var::E1]; }
  double e2() const { return (*this)[Var::E2]; }

  bool finite() const { return z.allFinite(); }
};

enum class ConstraintName : int { C1 = 0, E1 = 1, C2 = 2, E2 = 3 };

inline constexpr std::array<ConstraintName, kNumEqualities> kConstraintOrder{
    ConstraintName::C1, ConstraintName::E1, ConstraintName::C2,
    ConstraintName::E2};

inline constexpr int index_of(ConstraintName n) { return static_cast<int>(n); }

inline std::string_view to_string(ConstraintName n) {
  switch (n) {
  case ConstraintName::C1: return "C1";
  case ConstraintName::E1: return "E1";
  case ConstraintName::C2: return "C2";
  case ConstraintName::E2: return "E2";
  }
  return "?";
}

inline ConstraintName parse_constraint_name(std::string_view text) {
  for (auto n : kConstraintOrder)
    if (to_string(n) == text)
      return n;
  throw std::invalid_argument("unknown constraint name: " + std::string(text));
}

/// Right-hand-side offsets indexed by constraint, ordered (C1, E1, C2, E2).
struct RhsOffsets {
  std::array<double, kNumEqualities> values{0.0, 0.0, 0.0, 0.0};

  double operator[](ConstraintName n) const { return values[index_of(n)]; }
  double &operator[](ConstraintName n) { return values[index_of(n)]; }

  static RhsOffsets zero() { return {}; }
  static RhsOffsets single(ConstraintName n, double r) {
    RhsOffsets o;
    o[n] = r;
    return o;
  }

  bool finite() const {
    for (double v : values)
      if (!std::isfinite(v))
        return false;
    return true;
  }
  bool is_zero() const {
    for (double v : values)
      if (v != 0.0)
        return false;
    return true;
  }
};

using ScalarFn = std::function<double(const FullPoint &)>;
using GradientFn = std::function<Vector6(const FullPoint &)>;

/// g(z) = rhs_offset, with analytic gradient.
struct EqualityConstraint {
  ConstraintName name;
  ScalarFn residual;
  GradientFn gradient;
  double rhs_offset = 0.0;
};

/// h(z) >= 0. Carries no multiplier: used as a domain guard only.
struct InequalityConstraint {
  std::string label;
  ScalarFn value;
};

/// Shadow prices, one per equality, in units of objective per unit of the
/// constraint's right-hand side.
struct MultiplierSet {
  double lambda1 = 0.0; // C1
  double xi1 = 0.0;     // E1
  double lambda2 = 0.0; // C2
  double xi2 = 0.0;     // E2

  double operator[](ConstraintName n) const {
    switch (n) {
    case ConstraintName::C1: return lambda1;
    case ConstraintName::E1: return xi1;
    case ConstraintName::C2: return lambda2;
    case ConstraintName::E2: return xi2;
    }
    return 0.0;
  }

  Vector4 as_vector() const { return {lambda1, xi1, lambda2, xi2}; }
  static MultiplierSet from_vector(const Vector4 &v) {
    return {v[0], v[1], v[2], v[3]};
  }
};

class Problem {
public:
  Problem(ScalarFn objective, GradientFn objective_gradient,
          std::array<EqualityConstraint, kNumEqualities> equalities,
          std::vector<InequalityConstraint> inequalities)
      : objective_(std::move(objective)),
        objective_gradient_(std::move(objective_gradient)),
        equalities_(std::move(equalities)),
        inequalities_(std::move(inequalities)) {
    for (int j = 0; j < kNumEqualities; ++j) {
      if (equalities_[j].name != kConstraintOrder[j])
        throw std::invalid_argument(
            "equality constraints must be ordered C1, E1, C2, E2");
      if (!std::isfinite(equalities_[j].rhs_offset))
        throw std::invalid_argument("rhs offset must be finite");
    }
  }

  const VariableSpace &variables() const { return VariableSpace::orchard(); }

  double objective(const FullPoint &z) const { return objective_(z); }
  Vector6 objective_gradient(const FullPoint &z) const {
    return objective_gradient_(z);
  }

  const std::array<EqualityConstraint, kNumEqualities> &equalities() const {
    return equalities_;
  }
  const EqualityConstraint &equality(ConstraintName n) const {
    return equalities_[index_of(n)];
  }
  const std::vector<InequalityConstraint> &inequalities() const {
    return inequalities_;
  }

  RhsOffsets offsets() const {
    RhsOffsets o;
    for (const auto &eq : equalities_)
      o[eq.name] = eq.rhs_offset;
    return o;
  }

  /// Columns are grad g_j for j in (C1, E1, C2, E2).
  Eigen::Matrix<double, kNumVariables, kNumEqualities>
  constraint_jacobian_transpose(const FullPoint &z) const {
    Eigen::Matrix<double, kNumVariables, kNumEqualities> a;
    for (int j = 0; j < kNumEqualities; ++j)
      a.col(j) = equalities_[j].gradient(z);
    return a;
  }

  bool satisfies_inequalities(const FullPoint &z, double slack = 0.0) const {
    for (const auto &h : inequalities_)
      if (!(h.value(z) >= slack))
        return false;
    return true;
  }

  Problem shifted(ConstraintName name, double r) const {
    Problem out = *this;
    out.equalities_[index_of(name)].rhs_offset += r;
    return out;
  }

private:
  ScalarFn objective_;
  GradientFn objective_gradient_;
  std::array<EqualityConstraint, kNumEqualities> equalities_;
  std::vector<InequalityConstraint> inequalities_;
};

/// Component j is g_j(z) - r_j in the order (C1, E1, C2, E2).
inline Vector4 residual_vector(const Problem &problem, const FullPoint &z) {
  Vector4 out;
  for (int j = 0; j < kNumEqualities; ++j) {
    const auto &eq = problem.equalities()[j];
    out[j] = eq.residual(z) - eq.rhs_offset;
  }
  return out;
}

/// grad U(z) - sum_j m_j grad g_j(z). Zero at a regular interior optimum when
/// m holds the shadow prices.
inline Vector6 stationarity_residual(const Problem &problem, const FullPoint &z,
                                     const MultiplierSet &m) {
  if (!(z.c1() > 0.0) || !(z.c2() > 0.0))
    throw DomainError("stationarity residual requires c1 > 0 and c2 > 0");
  return problem.objective_gradient(z) -
         problem.constraint_jacobian_transpose(z) * m.as_vector();
}

/// Copy of `problem` with the named constraint's rhs offset increased by r.
inline Problem with_offset(const Problem &problem, ConstraintName name,
                           double r) {
  if (!std::isfinite(r))
    throw std::invalid_argument("offset must be finite");
  return problem.shifted(name, r);
}

inline Problem with_offset(const Problem &problem, std::string_view name,
                           double r) {
  return with_offset(problem, parse_constraint_name(name), r);
}

inline Problem with_offsets(const Problem &problem, const RhsOffsets &r) {
  Problem out = problem;
  for (auto n : kConstraintOrder)
    if (r[n] != 0.0)
      out = with_offset(out, n, r[n]);
  return out;
}

} // namespace shadowprice

#endif // SHADOWPRICE_NLP_CORE_HPP
