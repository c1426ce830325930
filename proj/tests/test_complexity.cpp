#include <gtest/gtest.h>

#include "genbound/genbound.hpp"
#include "oracles.hpp"

using namespace genbound;

namespace {

EvaluatedClass ones_pair() { return EvaluatedClass({{1.0, 1.0}}, 1.0); }

Options with_threads(unsigned t) {
  Options o;
  o.threads = t;
  return o;
}

}  // namespace

TEST(EmpiricalRademacher, SmallCases) {
  EXPECT_EQ(empirical_rademacher(EvaluatedClass({{0.0, 0.0, 0.0}}, 1.0)).value, 0.0);
  EXPECT_EQ(empirical_rademacher(EvaluatedClass({{3.0}}, 3.0)).value, 3.0);
  EXPECT_DOUBLE_EQ(empirical_rademacher(ones_pair()).value, 0.5);
  const auto r = empirical_rademacher(ones_pair());
  EXPECT_EQ(r.method, Method::ExactEnumeration);
  EXPECT_EQ(r.draws, 0u);
}

TEST(EmpiricalRademacher, MatchesRecursiveOracle) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto cls = random_class(1 + seed % 6, 1 + seed % 10, 1.0, seed);
    EXPECT_NEAR(empirical_rademacher(cls).value, (double)oracle::rademacher(cls.rows(), true), 1e-13);
    EXPECT_NEAR(empirical_rademacher_without_abs(cls).value, (double)oracle::rademacher(cls.rows(), false),
                1e-13);
  }
}

TEST(EmpiricalRademacher, ThreadCountDoesNotChangeBits) {
  const auto cls = random_class(5, 14, 1.0, 3);
  EXPECT_EQ(empirical_rademacher(cls, with_threads(1)).value, empirical_rademacher(cls, with_threads(8)).value);
}

TEST(EmpiricalRademacher, CapIsEnforced) {
  Options opts;
  opts.limits.max_sign_bits = 4;
  EXPECT_THROW(empirical_rademacher(random_class(2, 5, 1.0, 1), opts), ExactEnumerationLimit);
}

TEST(WithoutAbs, SmallCases) {
  EXPECT_NEAR(empirical_rademacher_without_abs(ones_pair()).value, 0.0, 1e-15);
  EXPECT_EQ(empirical_rademacher_without_abs(EvaluatedClass({{0.0, 0.0}}, 1.0)).value, 0.0);
}

TEST(WithoutAbs, NegationClosureRecoversAbsolute) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto f = random_class(1, 1 + seed % 8, 1.0, seed);
    const auto both = with_negations(f);
    EXPECT_NEAR(empirical_rademacher_without_abs(both).value, empirical_rademacher(f).value, 1e-12);
    const auto cmp = check_without_abs_le_abs(both);
    EXPECT_NEAR(cmp.slack, 0.0, 1e-12);
  }
}

TEST(WithoutAbs, NeverAboveAbsolute) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto cls = random_class(1 + seed % 5, 1 + seed % 6, 1.0, seed + 100);
    const auto cmp = check_without_abs_le_abs(cls);
    EXPECT_GE(cmp.slack, -1e-12);
  }
  const auto zero = check_without_abs_le_abs(EvaluatedClass({{0.0}, {0.0}}, 1.0));
  EXPECT_EQ(zero.with_abs, 0.0);
  EXPECT_EQ(zero.without_abs, 0.0);
}

TEST(SupremumWitness, LowestIndexOnTies) {
  const EvaluatedClass cls({{1.0, 0.0}, {1.0, 0.0}, {-2.0, 0.0}}, 2.0);
  EXPECT_EQ(supremum_witness(cls, SignAssignment{0, 2}), 2u);
  EXPECT_EQ(supremum_witness(cls, SignAssignment{0, 2}, false), 0u);
  EXPECT_THROW(supremum_witness(cls, SignAssignment{0, 3}), DimensionMismatch);
}

TEST(MonteCarlo, ZeroClassHasNoError) {
  const auto r = empirical_rademacher_mc(EvaluatedClass({{0.0, 0.0, 0.0}}, 1.0), 1000, 5);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.std_error, 0.0);
  EXPECT_EQ(r.method, Method::MonteCarlo);
}

TEST(MonteCarlo, WithinFourStandardErrors) {
  const auto r = empirical_rademacher_mc(ones_pair(), 100000, 42);
  EXPECT_LE(std::abs(r.value - 0.5), 4.0 * r.std_error);
  EXPECT_EQ(r.draws, 100000u);
  EXPECT_EQ(r.seed, 42u);
}

TEST(MonteCarlo, WorkerCountIsInvisible) {
  const auto cls = random_class(4, 9, 1.0, 8);
  const auto a = empirical_rademacher_mc(cls, 20000, 42, with_threads(1));
  const auto b = empirical_rademacher_mc(cls, 20000, 42, with_threads(8));
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(MonteCarlo, TooFewDrawsRejected) {
  EXPECT_THROW(empirical_rademacher_mc(ones_pair(), 10, 1), InvalidArgument);
}

TEST(ExpectedRademacher, PointMassEqualsEmpirical) {
  const LinearFamily fam({{0.5}, {-0.25}}, 1.0);
  const auto dist = DiscreteDistribution::point_mass({0.8});
  const auto expected = expected_rademacher(fam, dist, 3).value;
  const auto empirical = empirical_rademacher(evaluate(fam, Sample({{0.8}, {0.8}, {0.8}}))).value;
  EXPECT_NEAR(expected, empirical, 1e-15);
}

TEST(ExpectedRademacher, IdentityOnSigns) {
  const LinearFamily fam({{1.0}}, 1.0);
  const auto dist = DiscreteDistribution::uniform({{-1.0}, {1.0}});
  EXPECT_DOUBLE_EQ(expected_rademacher(fam, dist, 1).value, 1.0);
}

TEST(ExpectedRademacher, ZeroClass) {
  const SupportTable table({{0.0, 0.0, 0.0}}, {0.2, 0.3, 0.5}, 1.0);
  EXPECT_EQ(expected_rademacher(table, 3).value, 0.0);
}

TEST(ExpectedRademacher, MatchesProductOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto table = random_table(2 + seed % 2, 1 + seed % 4, 1.0, seed);
    const std::size_t n = 1 + seed % 4;
    EXPECT_NEAR(expected_rademacher(table, n).value,
                (double)oracle::expected_rademacher(table.rows(), table.probs(), n), 1e-13);
  }
}

TEST(ExpectedRademacherMc, PointMassHasZeroVariance) {
  const LinearFamily fam({{0.5}, {-0.25}}, 1.0);
  const auto r = expected_rademacher_mc(builder_for(fam), PointMassSampler({0.8}), 3, 500, 1);
  EXPECT_EQ(r.std_error, 0.0);
  EXPECT_NEAR(r.value, empirical_rademacher(evaluate(fam, Sample({{0.8}, {0.8}, {0.8}}))).value, 1e-15);
}

TEST(ExpectedRademacherMc, AgreesWithExactOnSigns) {
  const LinearFamily fam({{1.0}}, 1.0);
  const auto dist = DiscreteDistribution::uniform({{-1.0}, {1.0}});
  const auto exact = expected_rademacher(fam, dist, 1).value;
  const auto r = expected_rademacher_mc(builder_for(fam), DiscretePointSampler(dist), 1, 10000, 3);
  EXPECT_LE(std::abs(r.value - exact), 4.0 * r.std_error + 1e-15);
}

TEST(ExpectedRademacherMc, ErrorShrinksLikeRootDraws) {
  const LinearFamily fam({{1.0}, {-0.5}}, 1.0);
  const UniformBoxSampler sampler(1, -1.0, 1.0);
  const auto small = expected_rademacher_mc(builder_for(fam), sampler, 4, 2000, 11);
  const auto large = expected_rademacher_mc(builder_for(fam), sampler, 4, 8000, 11);
  const double ratio = small.std_error / large.std_error;
  EXPECT_GT(ratio, 1.0);
  EXPECT_LT(ratio, 4.0);
}

TEST(ExpectedRademacherMc, SingleSignPathAboveCap) {
  Options opts;
  opts.limits.max_sign_bits = 3;
  const LinearFamily fam({{1.0}}, 1.0);
  const auto r = expected_rademacher_mc(builder_for(fam), PointMassSampler({1.0}), 6, 20000, 2, opts);
  const double exact = (double)oracle::rademacher({{1, 1, 1, 1, 1, 1}});
  EXPECT_LE(std::abs(r.value - exact), 4.0 * r.std_error);
}

namespace {

GridFamily linear_box(unsigned dims) {
  GridFamily g;
  g.parameter_box.assign(dims, {-1.0, 1.0});
  g.evaluator = [](std::span<const double> theta, const Point& x) {
    double acc = 0.0;
    for (std::size_t j = 0; j < theta.size(); ++j) acc += theta[j] * x[j];
    return acc;
  };
  g.envelope = static_cast<double>(dims);
  return g;
}

}  // namespace

TEST(GridRestriction, ConstantEvaluatorConvergesImmediately) {
  GridFamily g;
  g.parameter_box = {{0.0, 1.0}};
  g.evaluator = [](std::span<const double>, const Point&) { return 0.3; };
  g.envelope = 1.0;
  const auto r = grid_restricted_class(g, Sample({{0.0}, {1.0}}));
  ASSERT_EQ(r.trace.size(), 2u);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.trace[0].value, r.trace[1].value);
}

TEST(GridRestriction, LinearFamilyReachesCorners) {
  const auto r = grid_restricted_class(linear_box(1), Sample({{1.0}, {1.0}}));
  const double corners = empirical_rademacher(EvaluatedClass({{-1.0, -1.0}, {1.0, 1.0}}, 1.0)).value;
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.trace.back().value, corners, 1e-6);
}

TEST(GridRestriction, ZeroToleranceRunsAllLevels) {
  auto g = linear_box(1);
  g.tolerance = 0.0;
  g.levels = 3;
  const auto r = grid_restricted_class(g, Sample({{1.0}, {1.0}}));
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.trace.size(), 3u);
}

TEST(GridRestriction, TruncatesAtFunctionCap) {
  auto g = linear_box(2);
  g.tolerance = 0.0;
  Options opts;
  opts.limits.max_grid_functions = 100;
  const auto r = grid_restricted_class(g, Sample({{1.0, 0.5}}), opts);
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.trace.size(), 3u);  // 9, 25, 81 functions; 289 exceeds the cap
}
