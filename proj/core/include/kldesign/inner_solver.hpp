#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kldesign/design.hpp"
#include "kldesign/models.hpp"
#include "kldesign/types.hpp"

namespace kld {

struct InnerConfig {
  int multistart_count = 8;
  /// Local convergence tolerance, relative to the parameter box sides.
  double tolerance = 1e-10;
  int max_local_iterations = 4000;
  /// Warm-start perturbation: U(-1, 1) * scale * (|beta_j| + 0.01) per coordinate.
  double warm_start_noise_scale = 0.1;
  /// Dispersion above this flags a singular design; unset means 1e-3 * box diameter.
  std::optional<double> dispersion_threshold;
  std::uint64_t seed = 0x5eed;

  void check() const;
};

struct LocalMinimum {
  Vector beta2;
  double value = 0.0;
};

struct InnerSolution {
  Vector beta2_hat;
  double value = 0.0;
  /// One entry per multistart, sorted by (value, beta2 lexicographic).
  std::vector<LocalMinimum> all_minima;
  /// Largest pairwise distance among minima tied with the best (relative tolerance 1e-8).
  double dispersion = 0.0;
  bool singular_flag = false;
  /// beta2_hat touches a face of the parameter box.
  bool boundary_hit = false;
};

/// Minimizes kl_average(pair, design, .) over the parameter box with
/// projected Nelder-Mead from several starts. The pool holds the perturbed
/// warm start (when given) and uniform draws from the box; each local run is
/// restarted until it stops improving and then polished with a Newton step on
/// a finite-difference quadratic model.
InnerSolution minimize_beta2(const ModelPair& pair, const Design& design, const InnerConfig& config,
                             const std::optional<Vector>& warm_start = std::nullopt);

double criterion_value(const ModelPair& pair, const Design& design, const InnerConfig& config,
                       const std::optional<Vector>& warm_start = std::nullopt);

struct LeastSquaresFit {
  Vector beta2;
  double value = 0.0;
};

/// Closed-form weighted least squares for a Gaussian pair (unconstrained in
/// beta2). Minimum-norm solution when the design is rank deficient.
LeastSquaresFit gaussian_least_squares_oracle(const ModelPair& pair, const Design& design);

/// Deterministic 64-bit mixing of a base seed with a stream index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace kld
