#include "kldesign/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kldesign/parallel.hpp"

namespace kld {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kCertified:
      return "certified";
    case Verdict::kRejected:
      return "rejected";
    case Verdict::kSingularNeedsRegularization:
      return "singular-needs-regularization";
  }
  return "unknown";
}

int default_verification_grid(int dim) { return dim == 1 ? 2001 : 201; }

EquivalenceReport equivalence_check(const ModelPair& pair, const Design& design, int grid_points_per_dim,
                                    const InnerConfig& inner,
                                    const std::optional<RegularizationConfig>& regularization) {
  require_valid(design);
  if (grid_points_per_dim < 2) throw DomainError("equivalence_check: grid needs at least 2 points per axis");

  EquivalenceReport report;
  report.grid_points_per_dim = grid_points_per_dim;
  const InnerSolution sol = regularization ? regularized_solution(pair, design, *regularization, inner)
                                           : minimize_beta2(pair, design, inner);
  report.criterion_value = sol.value;
  report.beta2_hat = sol.beta2_hat;
  report.pass_tolerance = 1e-6 * std::max(1.0, sol.value);
  if (regularization) report.gamma = regularization->gamma;

  if (!regularization && sol.singular_flag) {
    report.verdict = Verdict::kSingularNeedsRegularization;
    return report;
  }

  const double scale = regularization ? 1.0 - regularization->gamma : 1.0;
  const double average = kl_average(pair, design, sol.beta2_hat);
  const auto psi = [&](const Vector& x) { return scale * (kl_pointwise(pair, x, sol.beta2_hat) - average); };

  const DesignSpace& space = design.space;
  const int q = space.dim();
  long long total = 1;
  for (int i = 0; i < q; ++i) total *= grid_points_per_dim;
  report.curve.resize(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (total > 4096 && thread_count() > 1)
  for (long long k = 0; k < total; ++k) {
    Vector x(q);
    long long rest = k;
    for (int i = 0; i < q; ++i) {
      const double t = static_cast<double>(rest % grid_points_per_dim) / (grid_points_per_dim - 1);
      rest /= grid_points_per_dim;
      x(i) = space.lower(i) + t * (space.upper(i) - space.lower(i));
    }
    report.curve[static_cast<std::size_t>(k)] = {x, psi(x)};
  }

  report.psi_max = -std::numeric_limits<double>::infinity();
  for (const PsiSample& s : report.curve) {
    if (s.psi > report.psi_max) {
      report.psi_max = s.psi;
      report.psi_argmax = s.x;
    }
    if (std::abs(s.psi) <= report.pass_tolerance) report.near_zero.push_back(s.x);
  }
  bool support_ok = true;
  for (const Vector& x : design.points) {
    const double v = psi(x);
    report.support_psi.push_back(v);
    support_ok = support_ok && std::abs(v) <= report.pass_tolerance;
    if (v > report.psi_max) {
      report.psi_max = v;
      report.psi_argmax = x;
    }
  }
  report.verdict = (report.psi_max <= report.pass_tolerance && support_ok) ? Verdict::kCertified : Verdict::kRejected;
  return report;
}

InvarianceReport invariance_check(const ModelPair& pair, const Design& design, const AffineMap& map,
                                  const InnerConfig& inner) {
  const ModelPair transformed_pair = reparametrize_under_affine(pair, map);
  const Design transformed = transform_design(design, map);
  InvarianceReport r;
  r.value_original = criterion_value(pair, design, inner);
  r.value_transformed = criterion_value(transformed_pair, transformed, inner);
  r.difference = std::abs(r.value_original - r.value_transformed);
  r.passed = r.difference <= 1e-8 * std::max(1.0, r.value_original);
  return r;
}

}  // namespace kld
