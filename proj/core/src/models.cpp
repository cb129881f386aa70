#include "kldesign/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace kld {
namespace {

double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

void check_basis(const std::vector<Polynomial>& basis, int dim, const ParamBox& box) {
  if (basis.empty()) throw DomainError("model pair: rival basis is empty");
  if (static_cast<int>(basis.size()) != box.dim()) {
    throw DomainError("model pair: rival basis has " + std::to_string(basis.size()) +
                      " functions but the parameter box has dimension " + std::to_string(box.dim()));
  }
  std::set<std::vector<int>> seen;
  for (const Polynomial& p : basis) {
    if (p.dim() != dim) throw DomainError("model pair: rival basis dimension mismatch");
    if (p.terms().size() == 1 && !seen.insert(p.terms().front().exponents).second) {
      throw DomainError("model pair: rival basis exponents must be distinct");
    }
  }
}

}  // namespace

bool ParamBox::contains(const Vector& beta) const {
  return beta.size() == lower.size() && (beta.array() >= lower.array()).all() &&
         (beta.array() <= upper.array()).all();
}

void ParamBox::check() const {
  if (lower.size() < 1 || lower.size() != upper.size()) throw DomainError("parameter box: malformed bounds");
  for (Eigen::Index j = 0; j < lower.size(); ++j) {
    if (!(lower(j) < upper(j))) {
      throw DomainError("parameter box: lower[" + std::to_string(j) + "] must be < upper[" + std::to_string(j) + "]");
    }
  }
}

std::string to_string(DivergenceKind kind) {
  switch (kind) {
    case DivergenceKind::kGaussianRegression:
      return "gaussian-regression";
    case DivergenceKind::kLogisticGlm:
      return "logistic-glm";
    case DivergenceKind::kSyntheticFamily:
      return "synthetic-family";
  }
  return "unknown";
}

DivergenceKind divergence_kind_from_string(const std::string& tag) {
  if (tag == "gaussian-regression") return DivergenceKind::kGaussianRegression;
  if (tag == "logistic-glm") return DivergenceKind::kLogisticGlm;
  if (tag == "synthetic-family") return DivergenceKind::kSyntheticFamily;
  throw UnsupportedModelError("unknown model kind '" + tag + "'");
}

ModelPair ModelPair::gaussian_regression(Polynomial mean1, std::vector<Polynomial> rival_basis, double sigma2,
                                         ParamBox box) {
  box.check();
  if (!(sigma2 > 0.0)) throw DomainError("gaussian pair: sigma2 must be positive");
  check_basis(rival_basis, mean1.dim(), box);
  ModelPair p;
  p.kind_ = DivergenceKind::kGaussianRegression;
  p.space_dim_ = mean1.dim();
  p.true_predictor_ = std::move(mean1);
  p.rival_basis_ = std::move(rival_basis);
  p.sigma2_ = sigma2;
  p.box_ = std::move(box);
  return p;
}

ModelPair ModelPair::logistic_glm(Polynomial eta1, std::vector<Polynomial> rival_basis, ParamBox box) {
  box.check();
  check_basis(rival_basis, eta1.dim(), box);
  ModelPair p;
  p.kind_ = DivergenceKind::kLogisticGlm;
  p.space_dim_ = eta1.dim();
  p.true_predictor_ = std::move(eta1);
  p.rival_basis_ = std::move(rival_basis);
  p.box_ = std::move(box);
  return p;
}

ModelPair ModelPair::synthetic_family(ParamBox box) {
  box.check();
  if (box.dim() != 1 || !(box.lower(0) > 0.0)) {
    throw DomainError("synthetic family: parameter box must be a positive interval");
  }
  ModelPair p;
  p.kind_ = DivergenceKind::kSyntheticFamily;
  p.box_ = std::move(box);
  return p;
}

Vector ModelPair::regressors(const Vector& x) const {
  if (kind_ == DivergenceKind::kSyntheticFamily) {
    throw UnsupportedModelError("synthetic family has no linear predictor");
  }
  Vector row(static_cast<Eigen::Index>(rival_basis_.size()));
  for (std::size_t j = 0; j < rival_basis_.size(); ++j) row(static_cast<Eigen::Index>(j)) = rival_basis_[j](x);
  return row;
}

double ModelPair::rival_predictor(const Vector& x, const Vector& beta2) const {
  double eta = 0.0;
  for (std::size_t j = 0; j < rival_basis_.size(); ++j) eta += beta2(static_cast<Eigen::Index>(j)) * rival_basis_[j](x);
  return eta;
}

double ModelPair::divergence(const Vector& x, const Vector& beta2) const {
  double value = 0.0;
  switch (kind_) {
    case DivergenceKind::kGaussianRegression: {
      const double r = true_predictor_(x) - rival_predictor(x, beta2);
      value = r * r / (2.0 * sigma2_);
      break;
    }
    case DivergenceKind::kLogisticGlm: {
      const double eta1 = true_predictor_(x);
      const double eta2 = rival_predictor(x, beta2);
      value = (eta1 - eta2) * sigmoid(eta1) + softplus(eta2) - softplus(eta1);
      break;
    }
    case DivergenceKind::kSyntheticFamily: {
      const double t = x(0);
      const double b = beta2(0);
      value = b <= 1.0 ? 2.0 * ((2.0 * b - 1.0) * t + (1.0 - b)) : (b + 1.0) * std::pow(t, b);
      break;
    }
  }
  return std::max(0.0, value);
}

ModelPair ModelPair::with_param_box(ParamBox box) const {
  box.check();
  if (box.dim() != box_.dim()) throw DomainError("model pair: replacement box has the wrong dimension");
  ModelPair p = *this;
  p.box_ = std::move(box);
  return p;
}

double kl_pointwise(const ModelPair& pair, const Vector& x, const Vector& beta2) {
  return pair.divergence(x, beta2);
}

double kl_average(const ModelPair& pair, const Design& design, const Vector& beta2) {
  double sum = 0.0;
  for (std::size_t i = 0; i < design.size(); ++i) sum += design.weights[i] * pair.divergence(design.points[i], beta2);
  return sum;
}

Matrix rival_design_matrix(const ModelPair& pair, const Design& design) {
  Matrix X(static_cast<Eigen::Index>(design.size()), pair.rival_dim());
  for (std::size_t i = 0; i < design.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = pair.regressors(design.points[i]);
  return X;
}

ModelPair reparametrize_under_affine(const ModelPair& pair, const AffineMap& map) {
  if (pair.kind() == DivergenceKind::kSyntheticFamily) {
    throw UnsupportedModelError("synthetic family is not a polynomial-predictor model");
  }
  const Polynomial truth = pair.true_predictor().compose_inverse(map);
  std::vector<Polynomial> basis;
  for (const Polynomial& p : pair.rival_basis()) basis.push_back(p.compose_inverse(map));
  if (pair.kind() == DivergenceKind::kGaussianRegression) {
    return ModelPair::gaussian_regression(truth, std::move(basis), pair.sigma2(), pair.param_box());
  }
  return ModelPair::logistic_glm(truth, std::move(basis), pair.param_box());
}

double synthetic_uniform_average(double beta2, double upper) {
  if (!(upper > 0.0 && upper <= 1.0)) throw DomainError("synthetic fixture: upper limit must lie in (0, 1]");
  if (beta2 <= 1.0) return (2.0 * beta2 - 1.0) * upper + 2.0 * (1.0 - beta2);
  return std::pow(upper, beta2);
}

double synthetic_uniform_criterion(const ParamBox& box, double upper) {
  const double lo = box.lower(0);
  const double hi = box.upper(0);
  // Affine branch: slope 2 * (upper - 1) <= 0 in beta2, so the infimum sits at
  // min(hi, 1). Power branch: decreasing in beta2, infimum at hi.
  double best = std::numeric_limits<double>::infinity();
  if (lo <= 1.0) best = synthetic_uniform_average(std::min(hi, 1.0), upper);
  if (hi > 1.0) best = std::min(best, synthetic_uniform_average(hi, upper));
  return best;
}

}  // namespace kld
