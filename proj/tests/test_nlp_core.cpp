#include "oracles.hpp"
#include "shadowprice/orchard_model.hpp"
#include "shadowprice/solver.hpp"

#include <gtest/gtest.h>

using namespace shadowprice;

namespace {

FullPoint consistent_point(FormulationVariant v, double mu, double s,
                           const RhsOffsets &r = RhsOffsets::zero()) {
  return to_full_point({mu, s}, evaluate_chain(v, {mu, s}, r));
}

FullPoint random_full_point(oracle::Sampler &rng) {
  FullPoint z;
  z[Var::Mu] = rng.uniform(0.0, 1.0);
  z[Var::S] = rng.uniform(0.0, 1.0);
  z[Var::C1] = rng.uniform(1e-3, 1.0);
  z[Var::C2] = rng.uniform(1e-3, 1.0);
  z[Var::E1] = rng.uniform(0.0, 1.0);
  z[Var::E2] = rng.uniform(0.0, 1.0);
  return z;
}

} // namespace

TEST(VariableSpace, OrchardOrderAndLookup) {
  const auto &vs = VariableSpace::orchard();
  ASSERT_EQ(vs.size(), 6u);
  EXPECT_EQ(vs.name(0), "mu");
  EXPECT_EQ(vs.index("e2"), 5u);
  EXPECT_EQ(vs.index("c1"), static_cast<std::size_t>(Var::C1));
  EXPECT_THROW(vs.index("p2"), std::invalid_argument);
}

TEST(VariableSpace, RejectsDuplicateNames) {
  EXPECT_THROW((VariableSpace{"a", "b", "a"}), std::invalid_argument);
}

TEST(ConstraintNames, ParseRoundTrip) {
  for (auto n : kConstraintOrder)
    EXPECT_EQ(parse_constraint_name(to_string(n)), n);
  EXPECT_THROW(parse_constraint_name("X1"), std::invalid_argument);
  EXPECT_THROW(parse_constraint_name("c1"), std::invalid_argument);
}

TEST(ResidualVector, ZeroAtConsistentForwardPoint) {
  const auto p = build_problem(FormulationVariant::V_17_18);
  const auto z = consistent_point(FormulationVariant::V_17_18, 0.3, 0.2);
  const Vector4 r = residual_vector(p, z);
  EXPECT_LE(r.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ResidualVector, OnlyC1SeesC1Increment) {
  const auto p = build_problem(FormulationVariant::V_17_18);
  auto z = consistent_point(FormulationVariant::V_17_18, 0.3, 0.2);
  z[Var::C1] += 0.1;
  const Vector4 r = residual_vector(p, z);
  EXPECT_NEAR(r[0], 0.1, 1e-15);
  EXPECT_NEAR(r[1], 0.0, 1e-15);
  EXPECT_NEAR(r[2], 0.0, 1e-15);
  EXPECT_NEAR(r[3], 0.0, 1e-15);
}

TEST(ResidualVector, OffsetProblemConsistentWithOffsetChain) {
  for (auto v : kAllVariants) {
    const auto p = with_offset(build_problem(v), ConstraintName::E1, 0.05);
    const auto z = consistent_point(v, 0.3, 0.2, p.offsets());
    EXPECT_LE(residual_vector(p, z).cwiseAbs().maxCoeff(), 1e-15)
        << variant_id(v);
  }
}

TEST(WithOffset, ZeroIsIdentity) {
  oracle::Sampler rng(1);
  const auto p = build_problem(FormulationVariant::V_17a_18);
  const auto q = with_offset(p, ConstraintName::C2, 0.0);
  for (int k = 0; k < 20; ++k) {
    const auto z = random_full_point(rng);
    EXPECT_EQ(residual_vector(p, z), residual_vector(q, z));
  }
}

TEST(WithOffset, ForwardEvaluationShiftsE1) {
  const double delta = 0.037;
  const auto p =
      with_offset(build_problem(FormulationVariant::V_17_18), "E1", delta);
  const auto x = evaluate_chain(FormulationVariant::V_17_18, {0.4, 0.3},
                                p.offsets());
  EXPECT_DOUBLE_EQ(x.e1, 1.0 - 0.4 + delta);
}

TEST(WithOffset, Additive) {
  oracle::Sampler rng(2);
  const auto p = build_problem(FormulationVariant::V_17_18);
  const auto twice =
      with_offset(with_offset(p, ConstraintName::C1, 0.25), ConstraintName::C1,
                  -0.125);
  const auto once = with_offset(p, ConstraintName::C1, 0.125);
  for (int k = 0; k < 20; ++k) {
    const auto z = random_full_point(rng);
    EXPECT_EQ(residual_vector(twice, z), residual_vector(once, z));
  }
}

TEST(WithOffset, LeavesOriginalUntouched) {
  const auto p = build_problem(FormulationVariant::V_17_18);
  const auto q = with_offset(p, ConstraintName::E2, 0.5);
  EXPECT_EQ(p.offsets()[ConstraintName::E2], 0.0);
  EXPECT_EQ(q.offsets()[ConstraintName::E2], 0.5);
}

TEST(WithOffset, RejectsUnknownNameAndNonFinite) {
  const auto p = build_problem(FormulationVariant::V_17_18);
  EXPECT_THROW(with_offset(p, "C3", 1.0), std::invalid_argument);
  EXPECT_THROW(with_offset(p, ConstraintName::C1, std::nan("")),
               std::invalid_argument);
}

// residual(with_offset(P, j, r), z) == residual(P, z) - r e_j, exactly.
TEST(Properties, ResidualLinearInOffsets) {
  oracle::Sampler rng(3);
  for (auto v : kAllVariants) {
    const auto p = build_problem(v);
    for (int k = 0; k < 50; ++k) {
      const auto z = random_full_point(rng);
      const auto name = kConstraintOrder[k % 4];
      const double r = rng.uniform(-1.0, 1.0);
      Vector4 expected = residual_vector(p, z);
      expected[index_of(name)] -= r;
      EXPECT_EQ(residual_vector(with_offset(p, name, r), z), expected);
    }
  }
}

TEST(Properties, AnalyticGradientsMatchCentralDifferences) {
  oracle::Sampler rng(4);
  using F6 = std::function<double(const Vector6 &)>;
  auto as_point = [](const Vector6 &v) {
    FullPoint z;
    z.z = v;
    return z;
  };
  for (auto v : kAllVariants) {
    const auto p = build_problem(v);
    for (int k = 0; k < 100; ++k) {
      const auto z = random_full_point(rng);
      const F6 obj = [&](const Vector6 &x) { return p.objective(as_point(x)); };
      EXPECT_LE(oracle::rel_err(p.objective_gradient(z),
                                oracle::central_gradient<6>(obj, z.z)),
                1e-6);
      for (const auto &eq : p.equalities()) {
        const F6 g = [&](const Vector6 &x) { return eq.residual(as_point(x)); };
        EXPECT_LE(oracle::rel_err(eq.gradient(z),
                                  oracle::central_gradient<6>(g, z.z)),
                  1e-6)
            << variant_id(v) << " " << to_string(eq.name);
      }
    }
  }
}

TEST(Stationarity, ZeroMultipliersGiveObjectiveGradient) {
  const auto p = build_problem(FormulationVariant::V_17_18);
  const auto z =
      consistent_point(FormulationVariant::V_17_18, oracle::kMuStar, oracle::kSStar);
  const Vector6 r = stationarity_residual(p, z, MultiplierSet{});
  EXPECT_EQ(r, p.objective_gradient(z));
  EXPECT_DOUBLE_EQ(r[static_cast<int>(Var::C1)], 1.0 / (2.0 * std::sqrt(z.c1())));
  EXPECT_DOUBLE_EQ(r[static_cast<int>(Var::C2)], 1.0 / (2.0 * std::sqrt(z.c2())));
  EXPECT_GT(r[static_cast<int>(Var::C1)], 0.0);
  EXPECT_GT(r[static_cast<int>(Var::C2)], 0.0);
}

TEST(Stationarity, NonOptimalPointKeepsControlComponents) {
  const auto v = FormulationVariant::V_17_18;
  const auto p = build_problem(v);
  const auto z = consistent_point(v, 0.4, 0.3);
  const Vector4 m = oracle::normal_equations<6, 4>(
      p.constraint_jacobian_transpose(z), p.objective_gradient(z));
  const Vector6 r = stationarity_residual(p, z, MultiplierSet::from_vector(m));
  EXPECT_GT(std::abs(r[0]), 1e-3);
  EXPECT_GT(std::abs(r[1]), 1e-3);
}

TEST(Stationarity, DomainErrorOnNonPositiveConsumption) {
  const auto p = build_problem(FormulationVariant::V_17_18);
  auto z = consistent_point(FormulationVariant::V_17_18, 0.4, 0.3);
  z[Var::C1] = 0.0;
  EXPECT_THROW(stationarity_residual(p, z, {}), DomainError);
  z[Var::C1] = 0.1;
  z[Var::C2] = -0.1;
  EXPECT_THROW(stationarity_residual(p, z, {}), DomainError);
}

TEST(Problem, RejectsMisorderedConstraints) {
  const auto p = build_problem(FormulationVariant::V_17_18);
  auto eqs = p.equalities();
  std::swap(eqs[0], eqs[1]);
  EXPECT_THROW(Problem([](const FullPoint &) { return 0.0; },
                       [](const FullPoint &) { return Vector6::Zero().eval(); },
                       eqs, {}),
               std::invalid_argument);
}

TEST(Problem, InequalityGuards) {
  const auto p = build_problem(FormulationVariant::V_17_18);
  EXPECT_TRUE(p.satisfies_inequalities(
      consistent_point(FormulationVariant::V_17_18, 0.5, 0.206)));
  EXPECT_FALSE(p.satisfies_inequalities(
      consistent_point(FormulationVariant::V_17_18, 0.9, 0.5)));
}
