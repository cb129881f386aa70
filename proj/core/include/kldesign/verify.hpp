#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kldesign/design.hpp"
#include "kldesign/inner_solver.hpp"
#include "kldesign/models.hpp"
#include "kldesign/outer.hpp"

namespace kld {

enum class Verdict { kCertified, kRejected, kSingularNeedsRegularization };

std::string to_string(Verdict v);

struct PsiSample {
  Vector x;
  double psi = 0.0;
};

struct EquivalenceReport {
  int grid_points_per_dim = 0;
  double criterion_value = 0.0;
  Vector beta2_hat;
  double psi_max = 0.0;
  Vector psi_argmax;
  double pass_tolerance = 0.0;
  /// Grid points where |psi| <= pass_tolerance.
  std::vector<Vector> near_zero;
  /// psi (or psi_gamma) at each support point, in design order.
  std::vector<double> support_psi;
  /// The full grid curve, support points excluded.
  std::vector<PsiSample> curve;
  Verdict verdict = Verdict::kRejected;
  std::optional<double> gamma;
};

/// Evaluates psi (psi_gamma when `regularization` is given) on an
/// equispaced grid and at the support. Certified iff psi_max <= tol and every
/// support point has |psi| <= tol, with tol = 1e-6 * max(1, criterion value).
/// A singular inner solution without regularization yields
/// kSingularNeedsRegularization.
EquivalenceReport equivalence_check(const ModelPair& pair, const Design& design, int grid_points_per_dim,
                                    const InnerConfig& inner,
                                    const std::optional<RegularizationConfig>& regularization = std::nullopt);

/// Default grid: 2001 points for q = 1, 201 per axis otherwise.
int default_verification_grid(int dim);

struct InvarianceReport {
  double value_original = 0.0;
  double value_transformed = 0.0;
  double difference = 0.0;
  bool passed = false;
};

/// Compares I21 of `design` for `pair` with I21 of the transformed design
/// for the reparametrized pair. Passes when the gap is <= 1e-8 * max(1, value).
InvarianceReport invariance_check(const ModelPair& pair, const Design& design, const AffineMap& map,
                                  const InnerConfig& inner);

}  // namespace kld
