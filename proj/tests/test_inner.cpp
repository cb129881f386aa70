#include <gtest/gtest.h>

#include <random>

#include "kldesign/fixtures.hpp"
#include "kldesign/inner_solver.hpp"
#include "kldesign/parallel.hpp"
#include "test_support.hpp"

using namespace kld;
using kld::test::v1;

namespace {

struct GaussianInstance {
  ModelPair pair;
  Design design;
  LeastSquaresFit fit;
};

// Random polynomial pair with a box wide enough to contain the unconstrained fit.
GaussianInstance random_instance(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  const int d2 = std::uniform_int_distribution<int>(1, 4)(rng);
  std::vector<int> exps = {0, 1, 2, 3, 4, 5};
  std::shuffle(exps.begin(), exps.end(), rng);
  exps.resize(static_cast<std::size_t>(d2));
  std::vector<Polynomial> basis;
  for (int e : exps) basis.push_back(Polynomial::monomial({e}));
  std::vector<double> c(6);
  for (double& x : c) x = u(rng);
  const Polynomial truth = Polynomial::univariate(c);
  const Design d = test::random_line_design(rng, fixtures::chebyshev_space(), 8);
  const ParamBox wide{Vector::Constant(d2, -1e6), Vector::Constant(d2, 1e6)};
  const LeastSquaresFit fit = gaussian_least_squares_oracle(ModelPair::gaussian_regression(truth, basis, 0.5, wide), d);
  const Vector half = fit.beta2.cwiseAbs().array() + 1.0;
  return {ModelPair::gaussian_regression(truth, basis, 0.5, ParamBox{fit.beta2 - half, fit.beta2 + half}), d, fit};
}

// Weighted least squares by normal equations, independent of the library oracle.
double normal_equation_value(const ModelPair& p, const Design& d) {
  const Eigen::Index m = static_cast<Eigen::Index>(d.size());
  Matrix X(m, p.rival_dim());
  Vector y(m), w(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    X.row(i) = p.regressors(d.points[i]).transpose();
    y(i) = p.true_predictor()(d.points[i]);
    w(i) = d.weights[i];
  }
  const Matrix A = X.transpose() * w.asDiagonal() * X;
  const Vector b = A.completeOrthogonalDecomposition().solve(X.transpose() * w.asDiagonal() * y);
  const Vector r = y - X * b;
  return (w.array() * r.array().square()).sum() / (2 * p.sigma2());
}

}  // namespace

TEST(MinimizeBeta2, ChebyshevOptimum) {
  const InnerSolution s = minimize_beta2(fixtures::chebyshev_pair(), fixtures::chebyshev_optimum(), InnerConfig{});
  EXPECT_NEAR(s.beta2_hat(0), 0.0, 1e-4);
  EXPECT_NEAR(s.beta2_hat(1), 0.75, 1e-4);
  EXPECT_NEAR(s.beta2_hat(2), 0.0, 1e-4);
  EXPECT_NEAR(s.value, 0.0625, 1e-6);
  EXPECT_FALSE(s.singular_flag);
  EXPECT_NEAR(criterion_value(fixtures::chebyshev_pair(), fixtures::chebyshev_optimum(), InnerConfig{}), 0.0625, 1e-6);
}

TEST(MinimizeBeta2, NestedPairFitsExactly) {
  const double c[] = {1.0, 2.0, -1.0};
  const ModelPair p = ModelPair::gaussian_regression(
      Polynomial::univariate(c), {Polynomial::monomial({0}), Polynomial::monomial({1}), Polynomial::monomial({2})},
      0.5, ParamBox{Vector::Constant(3, -5), Vector::Constant(3, 5)});
  const Design d = test::line_design(fixtures::chebyshev_space(), {-0.9, -0.2, 0.4, 0.7}, {0.1, 0.2, 0.3, 0.4});
  const InnerSolution s = minimize_beta2(p, d, InnerConfig{});
  EXPECT_NEAR(s.value, 0.0, 1e-12);
  EXPECT_NEAR(s.beta2_hat(0), 1.0, 1e-5);
  EXPECT_NEAR(s.beta2_hat(1), 2.0, 1e-5);
  EXPECT_NEAR(s.beta2_hat(2), -1.0, 1e-5);
}

TEST(MinimizeBeta2, LogisticPointMassAtZeroIsSingular) {
  const ModelPair p = fixtures::logistic_pair();
  const InnerSolution s = minimize_beta2(p, Design::point_mass(fixtures::logistic_space(), v1(0)), InnerConfig{});
  EXPECT_NEAR(s.value, kl_pointwise(p, v1(0), Vector::Zero(2)), 1e-15);
  EXPECT_GT(s.dispersion, 1.0);
  EXPECT_TRUE(s.singular_flag);
}

TEST(MinimizeBeta2, EmptyDesignThrows) {
  Design d;
  d.space = fixtures::chebyshev_space();
  EXPECT_THROW(minimize_beta2(fixtures::chebyshev_pair(), d, InnerConfig{}), DomainError);
}

TEST(MinimizeBeta2, SolutionInvariants) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 30; ++t) {
    const auto inst = random_instance(rng);
    const InnerSolution s = minimize_beta2(inst.pair, inst.design, InnerConfig{});
    EXPECT_TRUE(inst.pair.param_box().contains(s.beta2_hat));
    EXPECT_NEAR(s.value, kl_average(inst.pair, inst.design, s.beta2_hat), 1e-12);
    for (const auto& m : s.all_minima) EXPECT_LE(s.value, m.value + 1e-12);
    EXPECT_EQ(s.all_minima.size(), 8u);
  }
}

TEST(MinimizeBeta2, MatchesLeastSquaresOracle) {
  std::mt19937_64 rng(2718);
  for (int t = 0; t < 100; ++t) {
    const auto inst = random_instance(rng);
    const double independent = normal_equation_value(inst.pair, inst.design);
    EXPECT_NEAR(inst.fit.value, independent, 1e-10);
    EXPECT_NEAR(minimize_beta2(inst.pair, inst.design, InnerConfig{}).value, inst.fit.value, 1e-8) << t;
  }
}

TEST(MinimizeBeta2, MoreStartsNeverWorse) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 20; ++t) {
    const auto inst = random_instance(rng);
    InnerConfig few;
    few.multistart_count = 4;
    InnerConfig more = few;
    more.multistart_count = 8;
    EXPECT_LE(minimize_beta2(inst.pair, inst.design, more).value,
              minimize_beta2(inst.pair, inst.design, few).value + 1e-12);
  }
}

TEST(MinimizeBeta2, WarmStartContinuity) {
  const ModelPair p = fixtures::chebyshev_pair();
  const Design xi = fixtures::chebyshev_start();
  const InnerSolution s0 = minimize_beta2(p, xi, InnerConfig{});
  for (double a : {1e-3, 1e-2, 5e-2}) {
    const InnerSolution s1 = minimize_beta2(p, mix_design(xi, v1(0.95), a), InnerConfig{}, s0.beta2_hat);
    EXPECT_LE(std::abs(s1.value - s0.value), 2.0 * a);
  }
}

TEST(MinimizeBeta2, WarmStartOutsideBoxIsClipped) {
  const ModelPair p = fixtures::chebyshev_pair();
  const InnerSolution s =
      minimize_beta2(p, fixtures::chebyshev_optimum(), InnerConfig{}, Vector::Constant(3, 100.0));
  EXPECT_NEAR(s.value, 0.0625, 1e-6);
}

TEST(MinimizeBeta2, ThreadCountDoesNotChangeResult) {
  const ModelPair p = fixtures::logistic_pair();
  const Design xi = fixtures::logistic_start();
  set_thread_count(1);
  const InnerSolution a = minimize_beta2(p, xi, InnerConfig{});
  set_thread_count(4);
  const InnerSolution b = minimize_beta2(p, xi, InnerConfig{});
  set_thread_count(0);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.beta2_hat, b.beta2_hat);
}

TEST(InnerConfig, RejectsNonPositive) {
  InnerConfig c;
  c.multistart_count = 0;
  EXPECT_THROW(c.check(), DomainError);
  c = InnerConfig{};
  c.tolerance = -1;
  EXPECT_THROW(c.check(), DomainError);
}

TEST(DeriveSeed, DistinctStreams) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(5, 3), derive_seed(5, 3));
}
