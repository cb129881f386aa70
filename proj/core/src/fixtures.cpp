#include "kldesign/fixtures.hpp"

#include <array>

namespace kld::fixtures {

ModelPair chebyshev_pair() {
  const std::array<double, 4> cubic{0.0, 0.0, 0.0, 1.0};
  return ModelPair::gaussian_regression(
      Polynomial::univariate(cubic), {Polynomial::monomial({0}), Polynomial::monomial({1}), Polynomial::monomial({2})},
      0.5, ParamBox{Vector::Constant(3, -5.0), Vector::Constant(3, 5.0)});
}

DesignSpace chebyshev_space() { return DesignSpace::interval(-1.0, 1.0); }

Design chebyshev_optimum() {
  const std::array<double, 4> pts{-1.0, -0.5, 0.5, 1.0};
  const std::array<double, 4> w{1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6};
  return Design::on_line(chebyshev_space(), pts, w);
}

Design chebyshev_start() {
  const std::array<double, 4> pts{-1.0, -0.6, 0.1, 0.8};
  const std::array<double, 4> w{0.25, 0.25, 0.25, 0.25};
  return Design::on_line(chebyshev_space(), pts, w);
}

AffineMap chebyshev_shift() { return AffineMap::scalar(2.0, 4.0); }

ModelPair logistic_pair() {
  const std::array<double, 3> eta1{1.0, 1.0, 1.0};
  return ModelPair::logistic_glm(Polynomial::univariate(eta1), {Polynomial::monomial({1}), Polynomial::monomial({2})},
                                 ParamBox{Vector::Constant(2, -20.0), Vector::Constant(2, 20.0)});
}

DesignSpace logistic_space() { return DesignSpace::interval(0.0, 1.0); }

Design logistic_start() {
  const std::array<double, 4> pts{0.0, 1.0 / 3, 2.0 / 3, 1.0};
  const std::array<double, 4> w{0.25, 0.25, 0.25, 0.25};
  return Design::on_line(logistic_space(), pts, w);
}

RegularizationConfig logistic_regularization() { return RegularizationConfig{0.05, logistic_start()}; }

ModelPair synthetic_pair(double lower, double upper) {
  return ModelPair::synthetic_family(ParamBox{Vector::Constant(1, lower), Vector::Constant(1, upper)});
}

}  // namespace kld::fixtures
