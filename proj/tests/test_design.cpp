#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kldesign/design.hpp"
#include "kldesign/fixtures.hpp"
#include "test_support.hpp"

using namespace kld;
using kld::test::line_design;
using kld::test::v1;

namespace {

const DesignSpace kUnit = DesignSpace::interval(-1.0, 1.0);

bool mentions(const ValidationReport& r, const std::string& text) {
  for (const auto& v : r.violations) {
    if (v.find(text) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST(DesignSpace, RejectsDegenerateBox) {
  EXPECT_THROW(DesignSpace::interval(1.0, 1.0).check(), DomainError);
  EXPECT_THROW((DesignSpace{Vector(0), Vector(0)}.check()), DomainError);
  EXPECT_NO_THROW(kUnit.check());
  EXPECT_NEAR(kUnit.diameter(), 2.0, 1e-15);
}

TEST(ValidateDesign, ChebyshevOptimumIsValid) {
  EXPECT_TRUE(validate_design(fixtures::chebyshev_optimum()).ok());
}

TEST(ValidateDesign, SinglePointIsValid) {
  EXPECT_TRUE(validate_design(Design::point_mass(DesignSpace::interval(0, 1), v1(0))).ok());
}

TEST(ValidateDesign, ReportsWeightSum) {
  const Design d = line_design(kUnit, {-0.5, 0.5}, {0.5, 0.6});
  const auto r = validate_design(d);
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(mentions(r, "weight sum 1.1"));
}

TEST(ValidateDesign, ReportsEveryViolation) {
  Design d = line_design(kUnit, {-0.5, 2.0, -0.5}, {0.5, -0.1, 0.6});
  const auto r = validate_design(d);
  EXPECT_GE(r.violations.size(), 3u);
  EXPECT_THROW(require_valid(d), DomainError);
}

TEST(MixDesign, TwoPointMixture) {
  const DesignSpace s = DesignSpace::interval(0, 1);
  const Design d = mix_design(Design::point_mass(s, v1(0)), v1(1), 0.5);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_DOUBLE_EQ(d.weights[0], 0.5);
  EXPECT_DOUBLE_EQ(d.weights[1], 0.5);
  EXPECT_DOUBLE_EQ(d.points[1](0), 1.0);
}

TEST(MixDesign, ZeroStepIsIdentity) {
  const Design xi = fixtures::chebyshev_optimum();
  const Design d = mix_design(xi, v1(0.3), 0.0);
  EXPECT_EQ(d.size(), xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) EXPECT_EQ(d.weights[i], xi.weights[i]);
}

TEST(MixDesign, MergesCoincidentPoint) {
  const Design d = mix_design(fixtures::chebyshev_optimum(), v1(1.0), 0.4);
  ASSERT_EQ(d.size(), 4u);
  const int k = d.find_point(v1(1.0));
  ASSERT_GE(k, 0);
  EXPECT_NEAR(d.weights[k], 0.5, 1e-15);
  EXPECT_NEAR(d.weights[d.find_point(v1(-0.5))], 0.6 / 3.0, 1e-15);
  EXPECT_NEAR(d.weights[d.find_point(v1(-1.0))], 0.6 / 6.0, 1e-15);
}

TEST(MixDesign, RejectsPointOutsideSpace) {
  EXPECT_THROW(mix_design(fixtures::chebyshev_optimum(), v1(1.5), 0.3), DomainError);
}

TEST(MixDesign, StaysValidAndClose) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const Design xi = test::random_line_design(rng, kUnit, 6);
    const double x = std::uniform_real_distribution<double>(-1, 1)(rng);
    for (double a : {0.0, 0.001, 0.3, 1.0}) {
      const Design m = mix_design(xi, v1(x), a);
      EXPECT_TRUE(validate_design(m).ok());
      EXPECT_LE(wasserstein_distance(m, xi), a * kUnit.diameter() + 1e-12);
    }
  }
}

TEST(CollapseSupport, SymmetricBarycenter) {
  const Design d = collapse_support(line_design(kUnit, {0.0, 0.01}, {0.5, 0.5}), v1(0.01), 0.02, 1.0);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NEAR(d.points[0](0), 0.005, 1e-15);
  EXPECT_DOUBLE_EQ(d.weights[0], 1.0);
}

TEST(CollapseSupport, AnchorWeightFactor) {
  const Design d = collapse_support(line_design(kUnit, {0.0, 0.01}, {0.5, 0.5}), v1(0.01), 0.02, 3.0);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NEAR(d.points[0](0), 0.0075, 1e-15);
  EXPECT_DOUBLE_EQ(d.weights[0], 1.0);
}

TEST(CollapseSupport, EmptyBallLeavesDesign) {
  const Design xi = fixtures::chebyshev_optimum();
  const Design d = collapse_support(xi, v1(0.0), 0.1, 2.0);
  ASSERT_EQ(d.size(), xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    EXPECT_EQ(d.points[i](0), xi.points[i](0));
    EXPECT_EQ(d.weights[i], xi.weights[i]);
  }
}

TEST(CollapseSupport, ClipsToBox) {
  const DesignSpace s = DesignSpace::interval(0, 1);
  const Design d = collapse_support(line_design(s, {0.99, 1.0}, {0.5, 0.5}), v1(1.0), 0.05, 1.0);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_TRUE(s.contains(d.points[0]));
}

TEST(PruneSupport, AbsoluteThreshold) {
  const Design d = prune_support(line_design(kUnit, {0.0, 0.5}, {0.998, 0.002}), 0.01, 0.0);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_DOUBLE_EQ(d.weights[0], 1.0);
  EXPECT_DOUBLE_EQ(d.points[0](0), 0.0);
}

TEST(PruneSupport, UniformUnchanged) {
  const Design d = prune_support(line_design(kUnit, {-1, -0.5, 0.5, 1}, {0.25, 0.25, 0.25, 0.25}), 0.01, 0.1);
  EXPECT_EQ(d.size(), 4u);
}

TEST(PruneSupport, RelativeThreshold) {
  const Design d = prune_support(line_design(kUnit, {-1, 0, 1}, {0.49, 0.49, 0.02}), 0.0, 0.1);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_NEAR(d.weights[0], 0.5, 1e-15);
  EXPECT_NEAR(d.weights[1], 0.5, 1e-15);
}

TEST(PruneSupport, NeverEmpties) {
  const Design d = prune_support(line_design(kUnit, {-1, 1}, {0.5, 0.5}), 0.9, 0.0);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_DOUBLE_EQ(d.weights[0], 1.0);
}

TEST(PruneCollapse, WeightsSumToOne) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const Design xi = test::random_line_design(rng, kUnit, 8);
    const double anchor = xi.points[0](0);
    for (const Design& d : {prune_support(xi, 0.05, 0.3), collapse_support(xi, v1(anchor), 0.3, 2.5)}) {
      double sum = 0.0;
      for (double w : d.weights) sum += w;
      EXPECT_NEAR(sum, 1.0, 1e-12);
      EXPECT_TRUE(validate_design(d).ok());
    }
  }
}

TEST(Wasserstein, PointMasses) {
  const DesignSpace s = DesignSpace::interval(0, 1);
  EXPECT_DOUBLE_EQ(wasserstein_distance(Design::point_mass(s, v1(0)), Design::point_mass(s, v1(1))), 1.0);
  const Design xi = fixtures::chebyshev_optimum();
  EXPECT_DOUBLE_EQ(wasserstein_distance(xi, xi), 0.0);
}

TEST(Wasserstein, OptimumAgainstUniformWeights) {
  const Design xi = fixtures::chebyshev_optimum();
  const Design u = line_design(kUnit, {-1, -0.5, 0.5, 1}, {0.25, 0.25, 0.25, 0.25});
  const double oracle = test::monotone_coupling_cost(xi, u);
  EXPECT_NEAR(oracle, 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(wasserstein_distance(xi, u), 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(wasserstein_distance_lp(xi, u), 1.0 / 12.0, 1e-12);
}

TEST(Wasserstein, MetricPropertiesAndOracles) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 200; ++t) {
    const Design a = test::random_line_design(rng, kUnit, 8);
    const Design b = test::random_line_design(rng, kUnit, 8);
    const Design c = test::random_line_design(rng, kUnit, 8);
    const double ab = wasserstein_distance(a, b);
    EXPECT_EQ(ab, wasserstein_distance(b, a));
    EXPECT_LE(ab, wasserstein_distance(a, c) + wasserstein_distance(c, b) + 1e-9);
    EXPECT_NEAR(ab, wasserstein_distance_lp(a, b), 1e-9);
    EXPECT_NEAR(ab, test::monotone_coupling_cost(a, b), 1e-12);
  }
}

TEST(Wasserstein, TwoDimensionalLp) {
  const DesignSpace s{Vector::Constant(2, 0.0), Vector::Constant(2, 1.0)};
  Design a = Design::point_mass(s, Vector::Zero(2));
  Design b = Design::uniform(s, {(Vector(2) << 1, 0).finished(), (Vector(2) << 0, 1).finished()});
  EXPECT_NEAR(wasserstein_distance(a, b), 1.0, 1e-12);
  b = Design::point_mass(s, Vector::Ones(2));
  EXPECT_NEAR(wasserstein_distance(a, b), std::sqrt(2.0), 1e-12);
}

TEST(Wasserstein, DimensionMismatch) {
  const DesignSpace s2{Vector::Zero(2), Vector::Ones(2)};
  EXPECT_THROW(wasserstein_distance(fixtures::chebyshev_optimum(), Design::point_mass(s2, Vector::Zero(2))),
               DomainError);
}

TEST(AffineMap, RejectsSingular) {
  EXPECT_THROW(AffineMap::scalar(1.0, 0.0), DomainError);
  Matrix B(2, 2);
  B << 1, 2, 2, 4;
  EXPECT_THROW(AffineMap(Vector::Zero(2), B), DomainError);
}

TEST(AffineMap, InverseRoundTripOnCorners) {
  Matrix B(2, 2);
  B << 2, 1, -1, 3;
  const AffineMap m((Vector(2) << 0.5, -1).finished(), B);
  const AffineMap inv = m.inverse();
  for (double a : {-1.0, 1.0}) {
    for (double b : {-1.0, 1.0}) {
      const Vector x = (Vector(2) << a, b).finished();
      EXPECT_LE((inv.apply(m.apply(x)) - x).norm(), 1e-10);
    }
  }
}

TEST(TransformDesign, ChebyshevShift) {
  const Design eta = transform_design(fixtures::chebyshev_optimum(), fixtures::chebyshev_shift());
  const double expect[] = {-2, 0, 4, 6};
  ASSERT_EQ(eta.size(), 4u);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(eta.points[i](0), expect[i], 1e-15);
  EXPECT_EQ(eta.weights, fixtures::chebyshev_optimum().weights);
  EXPECT_NEAR(eta.space.lower(0), -2.0, 1e-15);
  EXPECT_NEAR(eta.space.upper(0), 6.0, 1e-15);
  EXPECT_TRUE(validate_design(eta).ok());
}

TEST(TransformDesign, IdentityAndReflection) {
  const Design xi = fixtures::chebyshev_optimum();
  const Design same = transform_design(xi, AffineMap::identity(1));
  for (std::size_t i = 0; i < xi.size(); ++i) EXPECT_EQ(same.points[i](0), xi.points[i](0));
  const DesignSpace s = DesignSpace::interval(0, 1);
  const Design d = transform_design(Design::point_mass(s, v1(0)), AffineMap::scalar(1.0, -1.0));
  EXPECT_DOUBLE_EQ(d.points[0](0), 1.0);
}

TEST(TransformDesign, RoundTrip) {
  std::mt19937_64 rng(4);
  const AffineMap m = AffineMap::scalar(-3.0, 2.0);
  for (int t = 0; t < 50; ++t) {
    const Design xi = test::random_line_design(rng, kUnit, 8);
    const Design back = transform_design(transform_design(xi, m), m.inverse());
    for (std::size_t i = 0; i < xi.size(); ++i) {
      EXPECT_NEAR(back.points[i](0), xi.points[i](0), 1e-10);
      EXPECT_EQ(back.weights[i], xi.weights[i]);
    }
  }
}
