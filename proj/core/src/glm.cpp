#include "kldesign/glm.hpp"

#include <algorithm>
#include <cmath>

namespace kld {

double GlmFamily::weight(double eta) const {
  if (kind == Kind::kLinearGaussian) return 1.0 / sigma2;
  // canonical logit link: dmu/deta = Var(Y) = F(1 - F)
  const double f = 1.0 / (1.0 + std::exp(-eta));
  return f * (1.0 - f);
}

Matrix glm_fisher_information(const GlmDesignMatrix& m, const GlmFamily& family) {
  if (m.rows.cols() != m.beta2.size()) throw DomainError("glm_fisher_information: beta2 has the wrong size");
  const Vector eta = m.rows * m.beta2;
  Vector w(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) w(i) = family.weight(eta(i));
  Matrix J = m.rows.transpose() * w.asDiagonal() * m.rows;
  return 0.5 * (J + J.transpose());
}

bool glm_is_regular(const Matrix& rows) {
  const Eigen::Index n = rows.rows();
  const Eigen::Index d = rows.cols();
  if (n < d || d == 0) return false;
  const Vector sv = Eigen::JacobiSVD<Matrix>(rows).singularValues();
  const double smax = sv(0);
  if (smax == 0.0) return false;
  const double threshold = static_cast<double>(std::max(n, d)) * smax * 1e-12;
  return sv(d - 1) > threshold;
}

bool glm_is_regular(const GlmDesignMatrix& m) { return glm_is_regular(m.rows); }

bool information_is_nonsingular(const Matrix& information, Eigen::Index n_rows) {
  const Eigen::Index d = information.rows();
  if (d == 0) return false;
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(information, Eigen::EigenvaluesOnly).eigenvalues();
  const double lmax = ev(d - 1);
  if (!(lmax > 0.0)) return false;
  return ev(0) > static_cast<double>(std::max(n_rows, d)) * lmax * 1e-13;
}

GlmFamily glm_family(const ModelPair& pair) {
  switch (pair.kind()) {
    case DivergenceKind::kGaussianRegression:
      return GlmFamily::linear_gaussian(pair.sigma2());
    case DivergenceKind::kLogisticGlm:
      return GlmFamily::logistic();
    default:
      throw UnsupportedModelError("model pair is not a generalized linear model");
  }
}

GlmDesignMatrix glm_design_matrix(const ModelPair& pair, const Design& design, const Vector& beta2) {
  if (!pair.is_glm()) throw UnsupportedModelError("model pair is not a generalized linear model");
  return {rival_design_matrix(pair, design), beta2};
}

}  // namespace kld
