#pragma once

#include <string>
#include <vector>

#include "kldesign/design.hpp"
#include "kldesign/polynomial.hpp"
#include "kldesign/types.hpp"

namespace kld {

/// Closed box standing in for the rival parameter set.
struct ParamBox {
  Vector lower;
  Vector upper;

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Vector& beta) const;
  Vector clip(const Vector& beta) const { return beta.cwiseMax(lower).cwiseMin(upper); }
  double diameter() const { return (upper - lower).norm(); }
  void check() const;
};

enum class DivergenceKind { kGaussianRegression, kLogisticGlm, kSyntheticFamily };

std::string to_string(DivergenceKind kind);
DivergenceKind divergence_kind_from_string(const std::string& tag);

/// A true model f1(y|x; beta1) with beta1 fixed, and a rival f2(y|x; beta2)
/// with beta2 free in a ParamBox.
///
/// Gaussian and logistic pairs use polynomial predictors: the true predictor is
/// a fixed polynomial (its coefficients are beta1) and the rival predictor is
/// sum_j beta2[j] * basis[j](x). The synthetic family is a fixed function on
/// [0, 1] with a scalar rival parameter.
class ModelPair {
 public:
  /// Equal-variance Gaussian pair: I = (m1(x) - m2(x, beta2))^2 / (2 sigma2).
  static ModelPair gaussian_regression(Polynomial mean1, std::vector<Polynomial> rival_basis, double sigma2,
                                       ParamBox box);
  /// Bernoulli responses with logit links eta1(x) and eta2(x, beta2).
  static ModelPair logistic_glm(Polynomial eta1, std::vector<Polynomial> rival_basis, ParamBox box);
  /// Piecewise family on [0, 1] whose KL criterion is discontinuous in the design.
  static ModelPair synthetic_family(ParamBox box);

  DivergenceKind kind() const { return kind_; }
  const ParamBox& param_box() const { return box_; }
  int rival_dim() const { return box_.dim(); }
  int space_dim() const { return space_dim_; }
  bool is_glm() const { return kind_ != DivergenceKind::kSyntheticFamily; }

  /// Coefficients of the true predictor (empty for the synthetic family).
  Vector beta1() const { return true_predictor_.coefficient_vector(); }
  const Polynomial& true_predictor() const { return true_predictor_; }
  const std::vector<Polynomial>& rival_basis() const { return rival_basis_; }
  double sigma2() const { return sigma2_; }

  /// Basis functions of the rival predictor evaluated at x (the GLM regressor row).
  Vector regressors(const Vector& x) const;
  double rival_predictor(const Vector& x, const Vector& beta2) const;

  double divergence(const Vector& x, const Vector& beta2) const;

  ModelPair with_param_box(ParamBox box) const;

 private:
  ModelPair() = default;

  DivergenceKind kind_ = DivergenceKind::kGaussianRegression;
  Polynomial true_predictor_;
  std::vector<Polynomial> rival_basis_;
  double sigma2_ = 0.5;
  ParamBox box_;
  int space_dim_ = 1;
};

double kl_pointwise(const ModelPair& pair, const Vector& x, const Vector& beta2);

/// Design average of kl_pointwise.
double kl_average(const ModelPair& pair, const Design& design, const Vector& beta2);

/// Rows are the rival regressors at each support point.
Matrix rival_design_matrix(const ModelPair& pair, const Design& design);

/// The same statistical problem written in coordinates z = a + B x.
///
/// Every polynomial (true predictor and each rival basis function) is expanded
/// exactly in powers of z, so the rival function space on the image domain is
/// the original one and rival parameters carry over unchanged: g2 is the
/// identity. Only one experimental coordinate is supported.
ModelPair reparametrize_under_affine(const ModelPair& pair, const AffineMap& map);

/// Average of the synthetic divergence under the uniform law on [0, upper].
double synthetic_uniform_average(double beta2, double upper);

/// Infimum over `box` of synthetic_uniform_average(., upper), in closed form.
double synthetic_uniform_criterion(const ParamBox& box, double upper);

}  // namespace kld
