#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kldesign/design.hpp"
#include "kldesign/inner_solver.hpp"
#include "kldesign/models.hpp"
#include "kldesign/types.hpp"

namespace kld {

/// Mixes a fixed regular design into every iterate:
/// I_gamma(xi) = I21((1 - gamma) xi + gamma reference).
struct RegularizationConfig {
  double gamma = 0.05;
  Design reference;

  /// Checks 0 < gamma < 1, the reference design, its support size (>= d2)
  /// and, for GLM pairs, that its regressor matrix has full column rank.
  void check(const ModelPair& pair) const;

  /// Uniform weights on d2 + 1 equispaced points (a small factorial grid when q > 1).
  static RegularizationConfig with_default_reference(const ModelPair& pair, const DesignSpace& space,
                                                     double gamma = 0.05);

  /// (1 - gamma) design + gamma reference.
  Design apply(const Design& design) const;
};

struct AlgoConfig {
  /// Stop once the efficiency bound exceeds delta.
  double delta = 0.99;
  int max_iterations = 1000;
  int grid_points_per_dim = 201;
  double line_search_tolerance = 1e-8;
  /// Collapse radius r0 * n^-exponent; unset r0 means 0.05 * box diameter.
  std::optional<double> collapse_radius_base;
  double collapse_radius_exponent = 0.65;
  /// The newest point counts n^exponent times in the collapse barycenter.
  double anchor_weight_exponent = 0.8;
  double prune_abs = 1e-4;
  double prune_rel = 0.1;
  std::uint64_t seed = 1;
  /// Hand a stalled or singular plain run over to the regularized criterion.
  bool allow_regularization = true;
  /// Used on handoff; defaults to RegularizationConfig::with_default_reference.
  std::optional<RegularizationConfig> regularization;

  void check() const;
};

struct IterationRecord {
  int n = 0;
  Design design;
  Vector beta2_hat;
  /// Criterion of the current phase: I21(xi_n), or I_gamma(xi_n) once regularized.
  double value = 0.0;
  Vector best_point;
  double psi_max = 0.0;
  /// Step taken after this record; zero on the terminal record.
  double alpha = 0.0;
  double efficiency = 0.0;
  bool singular_flag = false;
  bool regularized = false;
};

enum class Termination { kEfficiencyReached, kMaxIterations, kStalledRegularized, kStalled };

std::string to_string(Termination t);

struct RunResult {
  Design final_design;
  Vector final_beta2;
  /// Criterion of the final phase (I_gamma when regularized).
  double final_value = 0.0;
  /// Plain I21 of the final design.
  double final_unregularized_value = 0.0;
  double final_efficiency = 0.0;
  std::vector<IterationRecord> history;
  /// kStalledRegularized: the plain criterion stalled (or became singular),
  /// the run switched to I_gamma and that continuation reached the bound.
  Termination termination = Termination::kStalled;
  bool regularized = false;
  double gamma = 0.0;
  /// Index of the first regularized record, or -1.
  int handoff_iteration = -1;
  std::vector<std::string> diagnostics;

  int regularized_iterations() const;
};

/// psi(x; xi) = I(x, beta2_hat) - sum_i w_i I(x_i, beta2_hat).
double directional_derivative_psi(const ModelPair& pair, const Design& design, const Vector& beta2_hat,
                                  const Vector& x);

/// (1 - gamma) * psi(x; xi) with beta2_hat taken from the regularized design.
double regularized_psi(const ModelPair& pair, const Design& design, const Vector& beta2_hat, const Vector& x,
                       double gamma);

struct SupportCandidate {
  Vector point;
  double psi_max = 0.0;
  double divergence = 0.0;
};

/// Maximizes I(., beta2_hat) over the design space: grid scan then bounded
/// Nelder-Mead ascent inside the best grid cell.
SupportCandidate best_support_candidate(const ModelPair& pair, const Design& design, const Vector& beta2_hat,
                                        const AlgoConfig& config);

struct LineSearchResult {
  double alpha = 0.0;
  double value = 0.0;
  Design design;
  /// Inner solution of the (regularized, if applicable) mixed design.
  InnerSolution solution;
};

/// Golden-section maximization of g(a) = I[(1 - a) design + a delta_x] on [0, 1].
/// `current` is the inner solution at a = 0 (computed if absent); the end
/// point a = 1 is also evaluated. alpha = 0 means no ascent was found.
LineSearchResult line_search_alpha(const ModelPair& pair, const Design& design, const Vector& x_n,
                                   const InnerConfig& inner, double tolerance = 1e-8,
                                   const std::optional<InnerSolution>& current = std::nullopt,
                                   const RegularizationConfig* regularization = nullptr);

/// U = 1 / (1 + psi_max / value). Throws UndefinedEfficiencyError for value <= 0.
double efficiency_bound(double criterion_value, double psi_max);

/// I_gamma(xi).
InnerSolution regularized_solution(const ModelPair& pair, const Design& design, const RegularizationConfig& reg,
                                   const InnerConfig& inner, const std::optional<Vector>& warm_start = std::nullopt);

/// First-order exchange algorithm with exact line search, collapse and prune
/// steps, and an automatic switch to the regularized criterion when the plain
/// one stalls or the support becomes too small.
RunResult run_first_order(const ModelPair& pair, const Design& initial, const AlgoConfig& algo,
                          const InnerConfig& inner);

/// Same loop on I_gamma from the first iteration.
RunResult run_regularized(const ModelPair& pair, const Design& initial, const AlgoConfig& algo,
                          const InnerConfig& inner, const RegularizationConfig& reg);

}  // namespace kld
