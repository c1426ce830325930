#include <gtest/gtest.h>

#include "genbound/genbound.hpp"
#include "oracles.hpp"

using namespace genbound;

namespace {

// f(x) = x tabulated on the given support points with uniform weights.
SupportTable identity_table(std::vector<double> support) {
  const std::vector<double> probs(support.size(), 1.0 / static_cast<double>(support.size()));
  return SupportTable({support}, probs, 1.0);
}

}  // namespace

TEST(UniformDeviation, SmallCases) {
  EXPECT_EQ(uniform_deviation(EvaluatedClass({{0.4, 0.4}}, 1.0, std::vector<double>{0.4})), 0.0);
  EXPECT_DOUBLE_EQ(uniform_deviation(EvaluatedClass({{1.0, 1.0}}, 1.0, std::vector<double>{0.5})), 0.5);
  EXPECT_DOUBLE_EQ(
      uniform_deviation(EvaluatedClass({{0.2}, {0.7}}, 1.0, std::vector<double>{0.0, 0.0})), 0.7);
  EXPECT_THROW(uniform_deviation(EvaluatedClass({{0.2}}, 1.0)), MissingPopulationMeans);
}

TEST(BoundedDifference, ConstantClassNeverMoves) {
  const SupportTable table({{0.3, 0.3, 0.3}}, {0.2, 0.3, 0.5}, 1.0);
  const auto audit = audit_bounded_difference(table, 3);
  EXPECT_EQ(audit.max_observed_delta, 0.0);
  EXPECT_FALSE(audit.violated);
}

TEST(BoundedDifference, IdentityOnBits) {
  const auto audit = audit_bounded_difference(identity_table({0.0, 1.0}), 2);
  EXPECT_DOUBLE_EQ(audit.theoretical_cap, 1.0);
  EXPECT_FALSE(audit.violated);
  EXPECT_EQ(audit.perturbations_checked, 4u * 2u * 2u);
  EXPECT_NEAR(audit.max_observed_delta,
              (double)oracle::max_bounded_difference({{0.0, 1.0}}, {0.5, 0.5}, 2), 1e-15);
}

TEST(BoundedDifference, UnderstatedEnvelopeIsSurfaced) {
  const SupportTable table({{-1.0, 1.0}, {0.5, -0.2}}, {0.5, 0.5}, 0.1);
  EXPECT_FALSE(table.envelope_holds());
  const auto audit = audit_bounded_difference(table, 2);
  EXPECT_TRUE(audit.violated);
  EXPECT_GT(audit.max_observed_delta, audit.theoretical_cap);
}

TEST(BoundedDifference, MatchesOracleOnRandomTables) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto table = random_table(2 + seed % 2, 1 + seed % 4, 1.0, seed);
    const std::size_t n = 1 + seed % 4;
    const auto audit = audit_bounded_difference(table, n);
    EXPECT_NEAR(audit.max_observed_delta,
                (double)oracle::max_bounded_difference(table.rows(), table.probs(), n), 1e-14);
    EXPECT_FALSE(audit.violated);
  }
}

TEST(Symmetrization, ConstantClass) {
  const auto r = check_symmetrization_identity(SupportTable({{0.5, 0.5}}, {0.4, 0.6}, 1.0), 2);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
}

TEST(Symmetrization, IdentityOnBits) {
  const auto r = check_symmetrization_identity(identity_table({0.0, 1.0}), 2);
  const auto o = oracle::symmetrization({{0.0, 1.0}}, {0.5, 0.5}, 2);
  EXPECT_LE(r.gap, 1e-10);
  EXPECT_NEAR(r.lhs, (double)o.lhs, 1e-14);
  EXPECT_NEAR(r.rhs, (double)o.rhs, 1e-14);
}

TEST(Symmetrization, RandomThreeFunctionClass) {
  const auto table = random_table(3, 3, 1.0, 77);
  const auto r = check_symmetrization_identity(table, 2);
  const auto o = oracle::symmetrization(table.rows(), table.probs(), 2);
  EXPECT_LE(r.gap, 1e-10);
  EXPECT_NEAR(r.lhs, (double)o.lhs, 1e-13);
  EXPECT_NEAR(std::abs((double)(o.lhs - o.rhs)), 0.0, 1e-13);
}

TEST(Symmetrization, CapIsEnforced) {
  Options opts;
  opts.limits.max_product_tuples = 1000;
  EXPECT_THROW(check_symmetrization_identity(random_table(3, 2, 1.0, 1), 3, opts), ExactEnumerationLimit);
}

TEST(ExpectationBound, ConstantClass) {
  const auto zero = verify_expectation_bound(SupportTable({{0.0, 0.0}}, {0.4, 0.6}, 1.0), 3);
  EXPECT_EQ(zero.lhs, 0.0);
  EXPECT_EQ(zero.rhs, 0.0);
  // A nonzero constant never deviates, but |mean of signs| keeps R_n positive:
  // E|(s1+s2+s3)/3| = 1/2 for n = 3.
  const auto half = verify_expectation_bound(SupportTable({{0.5, 0.5}}, {0.4, 0.6}, 1.0), 3);
  EXPECT_EQ(half.lhs, 0.0);
  EXPECT_DOUBLE_EQ(half.rhs, 2.0 * 0.5 * 0.5);
}

TEST(ExpectationBound, IdentityOnSigns) {
  const auto table = identity_table({-1.0, 1.0});
  const auto r = verify_expectation_bound(table, 2);
  EXPECT_NEAR(r.lhs, (double)oracle::expected_deviation({{-1.0, 1.0}}, {0.5, 0.5}, 2), 1e-15);
  EXPECT_NEAR(r.rhs, 2.0 * (double)oracle::expected_rademacher({{-1.0, 1.0}}, {0.5, 0.5}, 2), 1e-15);
  EXPECT_LE(r.lhs, r.rhs);
}

TEST(ExpectationBound, RandomFourFunctionClass) {
  const auto table = random_table(2, 4, 1.0, 5);
  const auto r = verify_expectation_bound(table, 3);
  EXPECT_NEAR(r.lhs, (double)oracle::expected_deviation(table.rows(), table.probs(), 3), 1e-14);
  EXPECT_NEAR(r.rhs, 2.0 * (double)oracle::expected_rademacher(table.rows(), table.probs(), 3), 1e-14);
  EXPECT_GE(r.slack, 0.0);
}
