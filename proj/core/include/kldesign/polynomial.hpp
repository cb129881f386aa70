#pragma once

#include <span>
#include <vector>

#include "kldesign/design.hpp"
#include "kldesign/types.hpp"

namespace kld {

/// One monomial c * x_1^e_1 * ... * x_q^e_q.
struct Monomial {
  std::vector<int> exponents;
  double coefficient = 0.0;
};

/// Sparse multivariate polynomial in the experimental coordinates.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(int dim, std::vector<Monomial> terms);

  /// Dense univariate polynomial: coefficients[k] multiplies x^k.
  static Polynomial univariate(std::span<const double> coefficients);
  /// Single monomial x^exponents with unit coefficient.
  static Polynomial monomial(std::vector<int> exponents);

  int dim() const { return dim_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  int degree() const;

  double operator()(const Vector& x) const;

  /// Dense coefficients in powers of x (q = 1 only).
  std::vector<double> univariate_coefficients() const;
  /// Coefficient vector in the order of terms(); this is the parameter vector
  /// when the polynomial is a fixed predictor.
  Vector coefficient_vector() const;

  /// p(inverse(z)) expressed as a polynomial in z, i.e. the same function in
  /// the transformed coordinates z = a + B x. Only q = 1 is supported.
  Polynomial compose_inverse(const AffineMap& map) const;

 private:
  int dim_ = 1;
  std::vector<Monomial> terms_;
};

}  // namespace kld
