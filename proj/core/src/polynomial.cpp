#include "kldesign/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace kld {

Polynomial::Polynomial(int dim, std::vector<Monomial> terms) : dim_(dim), terms_(std::move(terms)) {
  if (dim_ < 1) throw DomainError("polynomial: dimension must be at least 1");
  for (const Monomial& m : terms_) {
    if (static_cast<int>(m.exponents.size()) != dim_) {
      throw DomainError("polynomial: monomial exponent count does not match the dimension");
    }
    if (std::any_of(m.exponents.begin(), m.exponents.end(), [](int e) { return e < 0; })) {
      throw DomainError("polynomial: negative exponent");
    }
  }
}

Polynomial Polynomial::univariate(std::span<const double> coefficients) {
  std::vector<Monomial> terms;
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    terms.push_back({{static_cast<int>(k)}, coefficients[k]});
  }
  return Polynomial(1, std::move(terms));
}

Polynomial Polynomial::monomial(std::vector<int> exponents) {
  const int dim = static_cast<int>(exponents.size());
  return Polynomial(dim, {{std::move(exponents), 1.0}});
}

int Polynomial::degree() const {
  int d = 0;
  for (const Monomial& m : terms_) {
    int total = 0;
    for (int e : m.exponents) total += e;
    d = std::max(d, total);
  }
  return d;
}

double Polynomial::operator()(const Vector& x) const {
  double sum = 0.0;
  for (const Monomial& m : terms_) {
    double v = m.coefficient;
    for (int i = 0; i < dim_; ++i) {
      for (int e = 0; e < m.exponents[static_cast<std::size_t>(i)]; ++e) v *= x(i);
    }
    sum += v;
  }
  return sum;
}

std::vector<double> Polynomial::univariate_coefficients() const {
  if (dim_ != 1) throw UnsupportedModelError("polynomial: dense coefficients need a univariate polynomial");
  std::vector<double> c(static_cast<std::size_t>(degree()) + 1, 0.0);
  for (const Monomial& m : terms_) c[static_cast<std::size_t>(m.exponents[0])] += m.coefficient;
  return c;
}

Vector Polynomial::coefficient_vector() const {
  Vector v(static_cast<Eigen::Index>(terms_.size()));
  for (std::size_t k = 0; k < terms_.size(); ++k) v(static_cast<Eigen::Index>(k)) = terms_[k].coefficient;
  return v;
}

Polynomial Polynomial::compose_inverse(const AffineMap& map) const {
  if (dim_ != 1 || map.dim() != 1) {
    throw UnsupportedModelError("polynomial reparametrization is implemented for one experimental coordinate");
  }
  // x = s * z + t with s = 1/B, t = -a/B; expand sum_k c_k (s z + t)^k.
  const double s = map.inverse_matrix()(0, 0);
  const double t = -s * map.offset()(0);
  const std::vector<double> c = univariate_coefficients();
  std::vector<double> out(c.size(), 0.0);
  std::vector<double> power{1.0};  // coefficients of (s z + t)^k
  for (std::size_t k = 0; k < c.size(); ++k) {
    for (std::size_t j = 0; j < power.size(); ++j) out[j] += c[k] * power[j];
    std::vector<double> next(power.size() + 1, 0.0);
    for (std::size_t j = 0; j < power.size(); ++j) {
      next[j] += t * power[j];
      next[j + 1] += s * power[j];
    }
    power = std::move(next);
  }
  return univariate(out);
}

}  // namespace kld
