#include "oracles.hpp"
#include "shadowprice/sensitivity.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>

using namespace shadowprice;

namespace {

constexpr double kFdTol = 1e-4;

std::size_t index_in_table(FormulationVariant v) {
  return static_cast<std::size_t>(v);
}

} // namespace

TEST(FdShadowPrice, FirstPeriodConsumption) {
  const auto fd = fd_shadow_price(FormulationVariant::V_17_18,
                                  ConstraintName::C1, 1e-3);
  EXPECT_NEAR(fd.value, oracle::kLambda1, 1e-5);
  EXPECT_NEAR(fd.value, 1.3041, 1e-3);
  EXPECT_EQ(fd.eps, 1e-3);
  EXPECT_GT(fd.v_plus, fd.v_minus);
}

TEST(FdShadowPrice, FirstPeriodFlies) {
  const auto fd = fd_shadow_price(FormulationVariant::V_17_18,
                                  ConstraintName::E1, 1e-3);
  EXPECT_NEAR(fd.value, oracle::kXi1[0], 1e-5);
  EXPECT_NEAR(fd.value, -1.0355, 1e-3);
}

TEST(FdShadowPrice, FullySubstitutedFliesPriceEqualsLambda1) {
  const auto v = FormulationVariant::V_17a_18a;
  const double xi1 = fd_shadow_price(v, ConstraintName::E1, 1e-3).value;
  const double lambda1 = fd_shadow_price(v, ConstraintName::C1, 1e-3).value;
  EXPECT_NEAR(xi1, -oracle::kLambda1, 1e-5);
  EXPECT_NEAR(-xi1 / lambda1, 1.000, 1e-3);
}

TEST(FdShadowPrice, StepOutOfRange) {
  EXPECT_THROW(fd_shadow_price(FormulationVariant::V_17_18, ConstraintName::C1, 0.5),
               std::invalid_argument);
  EXPECT_THROW(fd_shadow_price(FormulationVariant::V_17_18, ConstraintName::C1, 1e-8),
               std::invalid_argument);
}

TEST(Properties, RichardsonTightensAgreement) {
  for (auto v : kAllVariants) {
    const auto sol = solve(v);
    for (auto name : kConstraintOrder) {
      const double r = richardson_shadow_price(v, name);
      EXPECT_NEAR(r, sol.multipliers[name], 1e-6)
          << variant_id(v) << " " << to_string(name);
    }
  }
}

TEST(Properties, OnlyTheFliesPriceDependsOnFormulation) {
  std::array<double, 4> xi1{}, lambda1{};
  for (auto v : kAllVariants) {
    const auto k = index_in_table(v);
    xi1[k] = fd_shadow_price(v, ConstraintName::E1, 1e-3).value;
    lambda1[k] = fd_shadow_price(v, ConstraintName::C1, 1e-3).value;
  }
  const auto [xmin, xmax] = std::minmax_element(xi1.begin(), xi1.end());
  const auto [lmin, lmax] = std::minmax_element(lambda1.begin(), lambda1.end());
  EXPECT_GT(*xmax - *xmin, 10 * kFdTol);
  EXPECT_LE(*lmax - *lmin, kFdTol);
}

TEST(Compensation, PrintedEstimateCancelsFirstOrder) {
  const double dv =
      compensation_delta(FormulationVariant::V_17_18, 0.794, 1e-3);
  EXPECT_LE(std::abs(dv), 1e-5);
}

TEST(Compensation, UncompensatedIsFirstOrder) {
  const double dv = compensation_delta(FormulationVariant::V_17_18, 0.0, 1e-3);
  const double expected = oracle::kXi1[0] * 1e-3;
  EXPECT_NEAR(dv, expected, 0.1 * std::abs(expected));
  EXPECT_NEAR(dv, -1.04e-3, 1e-5);
}

TEST(Compensation, ZeroDeltaIsExactlyZero) {
  for (auto v : kAllVariants)
    EXPECT_EQ(compensation_delta(v, 0.8, 0.0), 0.0);
}

TEST(Properties, CompensatedChangeDecaysQuadratically) {
  for (auto v : kAllVariants) {
    const auto sol = solve(v);
    const double x = -sol.multipliers.xi1 / sol.multipliers.lambda1;
    const auto sweep = compensation_sweep(v, x, {4e-3, 2e-3, 1e-3, 5e-4});
    EXPECT_TRUE(sweep.decays_quadratically()) << variant_id(v);
    EXPECT_LE(std::abs(sweep.points[2].delta_v), 1e-5);
  }
}

TEST(Compensation, RatioDecaysWhereSecondOrderTermIsPresent) {
  for (auto v : {FormulationVariant::V_17_18, FormulationVariant::V_17_18a,
                 FormulationVariant::V_17a_18}) {
    const auto sol = solve(v);
    const auto sweep = compensation_sweep(
        v, -sol.multipliers.xi1 / sol.multipliers.lambda1, {4e-3, 2e-3, 1e-3, 5e-4});
    EXPECT_GT(sweep.gamma, 0.0) << variant_id(v);
    for (double ratio : sweep.decay_ratios()) {
      EXPECT_GE(ratio, 0.25) << variant_id(v);
      EXPECT_LE(ratio, 4.0) << variant_id(v);
    }
  }
}

TEST(Compensation, FullySubstitutedValueIsInvariant) {
  // Removing a unit of flies and adding a unit of consumption leaves the
  // optimal value unchanged when both second-period equations use kept fruit.
  for (double d : {4e-3, 1e-3, 5e-4})
    EXPECT_NEAR(compensation_delta(FormulationVariant::V_17a_18a, 1.0, d), 0.0, 1e-14);
}
