#pragma once

#include "kldesign/design.hpp"
#include "kldesign/models.hpp"
#include "kldesign/types.hpp"

namespace kld {

/// Regressor matrix X (n x d2) together with the rival parameters at which
/// the GLM weights are evaluated.
struct GlmDesignMatrix {
  Matrix rows;
  Vector beta2;
};

/// Variance function and mean derivative hook for the built-in families.
struct GlmFamily {
  enum class Kind { kLogistic, kLinearGaussian };
  Kind kind = Kind::kLogistic;
  double sigma2 = 1.0;

  static GlmFamily logistic() { return {Kind::kLogistic, 1.0}; }
  static GlmFamily linear_gaussian(double sigma2) { return {Kind::kLinearGaussian, sigma2}; }

  /// (d mu / d eta)^2 / Var(Y) at the given linear predictor.
  double weight(double eta) const;
};

/// J = X' W X.
Matrix glm_fisher_information(const GlmDesignMatrix& m, const GlmFamily& family);

/// rank(X) == d2, with singular values below max(n, d2) * sigma_max * 1e-12
/// treated as zero.
bool glm_is_regular(const GlmDesignMatrix& m);
bool glm_is_regular(const Matrix& rows);

/// Smallest eigenvalue of a symmetric information matrix exceeds
/// max(n, d2) * lambda_max * 1e-13; the eigenvalue-side counterpart of
/// glm_is_regular.
bool information_is_nonsingular(const Matrix& information, Eigen::Index n_rows);

GlmFamily glm_family(const ModelPair& pair);
GlmDesignMatrix glm_design_matrix(const ModelPair& pair, const Design& design, const Vector& beta2);

}  // namespace kld
