#include "kldesign/outer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kldesign/glm.hpp"
#include "kldesign/nelder_mead.hpp"
#include "kldesign/parallel.hpp"

namespace kld {
namespace {

constexpr double kGoldenRatio = 0.6180339887498949;

InnerConfig with_seed(const InnerConfig& inner, std::uint64_t seed) {
  InnerConfig c = inner;
  c.seed = seed;
  return c;
}

// Inner solve on the design actually used for step (a1): the design itself,
// or its regularized mixture.
InnerSolution solve_phase(const ModelPair& pair, const Design& design, const RegularizationConfig* reg,
                          const InnerConfig& inner, const std::optional<Vector>& warm) {
  return reg ? regularized_solution(pair, design, *reg, inner, warm) : minimize_beta2(pair, design, inner, warm);
}

Vector grid_point(const DesignSpace& space, int per_dim, long long index) {
  const int q = space.dim();
  Vector x(q);
  for (int i = 0; i < q; ++i) {
    const long long k = index % per_dim;
    index /= per_dim;
    const double t = per_dim > 1 ? static_cast<double>(k) / (per_dim - 1) : 0.5;
    x(i) = space.lower(i) + t * (space.upper(i) - space.lower(i));
  }
  return x;
}

bool same_design(const Design& a, const Design& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.weights[i] != b.weights[i] || a.points[i] != b.points[i]) return false;
  }
  return true;
}

}  // namespace

void RegularizationConfig::check(const ModelPair& pair) const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("regularization: gamma must lie in (0, 1)");
  require_valid(reference);
  if (static_cast<int>(reference.size()) < pair.rival_dim()) {
    throw DomainError("regularization: reference design needs at least d2 = " + std::to_string(pair.rival_dim()) +
                      " support points");
  }
  if (pair.is_glm() && !glm_is_regular(rival_design_matrix(pair, reference))) {
    throw DomainError("regularization: reference design has a singular information matrix");
  }
}

RegularizationConfig RegularizationConfig::with_default_reference(const ModelPair& pair, const DesignSpace& space,
                                                                  double gamma) {
  const int target = pair.rival_dim() + 1;
  const int q = space.dim();
  int per_dim = q == 1 ? target : 2;
  while (std::pow(per_dim, q) < target) ++per_dim;
  long long total = 1;
  for (int i = 0; i < q; ++i) total *= per_dim;
  std::vector<Vector> pts;
  for (long long k = 0; k < total; ++k) pts.push_back(grid_point(space, per_dim, k));
  RegularizationConfig reg{gamma, Design::uniform(space, std::move(pts))};
  reg.check(pair);
  return reg;
}

Design RegularizationConfig::apply(const Design& design) const { return mix_designs(design, reference, gamma); }

void AlgoConfig::check() const {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("algorithm: delta must lie in (0, 1)");
  if (max_iterations < 0) throw DomainError("algorithm: max_iterations must be >= 0");
  if (grid_points_per_dim < 2) throw DomainError("algorithm: grid_points_per_dim must be >= 2");
  if (!(line_search_tolerance > 0.0)) throw DomainError("algorithm: line_search_tolerance must be positive");
  if (collapse_radius_base && !(*collapse_radius_base > 0.0)) {
    throw DomainError("algorithm: collapse_radius_base must be positive");
  }
  if (!(collapse_radius_exponent > 0.0) || !(anchor_weight_exponent > 0.0)) {
    throw DomainError("algorithm: exponents must be positive");
  }
  if (prune_abs < 0.0 || prune_rel < 0.0) throw DomainError("algorithm: prune thresholds must be >= 0");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kEfficiencyReached:
      return "efficiency-reached";
    case Termination::kMaxIterations:
      return "max-iterations";
    case Termination::kStalledRegularized:
      return "stalled-regularized";
    case Termination::kStalled:
      return "stalled";
  }
  return "unknown";
}

int RunResult::regularized_iterations() const {
  return static_cast<int>(std::count_if(history.begin(), history.end(),
                                        [](const IterationRecord& r) { return r.regularized; }));
}

double directional_derivative_psi(const ModelPair& pair, const Design& design, const Vector& beta2_hat,
                                  const Vector& x) {
  return kl_pointwise(pair, x, beta2_hat) - kl_average(pair, design, beta2_hat);
}

double regularized_psi(const ModelPair& pair, const Design& design, const Vector& beta2_hat, const Vector& x,
                       double gamma) {
  return (1.0 - gamma) * directional_derivative_psi(pair, design, beta2_hat, x);
}

SupportCandidate best_support_candidate(const ModelPair& pair, const Design& design, const Vector& beta2_hat,
                                        const AlgoConfig& config) {
  const DesignSpace& space = design.space;
  const int q = space.dim();
  const int per_dim = config.grid_points_per_dim;
  long long total = 1;
  for (int i = 0; i < q; ++i) total *= per_dim;

  std::vector<double> values(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (total > 4096 && thread_count() > 1)
  for (long long k = 0; k < total; ++k) {
    values[static_cast<std::size_t>(k)] = kl_pointwise(pair, grid_point(space, per_dim, k), beta2_hat);
  }
  const auto best_it = std::max_element(values.begin(), values.end());
  Vector best = grid_point(space, per_dim, best_it - values.begin());
  double best_value = *best_it;

  // Ascent inside the neighbouring grid cells.
  const Vector spacing = (space.upper - space.lower) / static_cast<double>(per_dim - 1);
  const Vector lo = space.clip(best - spacing);
  const Vector hi = space.clip(best + spacing);
  NelderMeadOptions options;
  options.initial_step = 0.25;
  options.x_tolerance = 1e-10;
  options.max_iterations = 500;
  const NelderMeadResult polish = nelder_mead_minimize(
      [&](const Vector& x) { return -kl_pointwise(pair, x, beta2_hat); }, best, lo, hi, options);
  if (-polish.value > best_value) {
    best = polish.x;
    best_value = -polish.value;
  }

  SupportCandidate c;
  c.point = best;
  c.divergence = best_value;
  c.psi_max = best_value - kl_average(pair, design, beta2_hat);
  return c;
}

InnerSolution regularized_solution(const ModelPair& pair, const Design& design, const RegularizationConfig& reg,
                                   const InnerConfig& inner, const std::optional<Vector>& warm_start) {
  return minimize_beta2(pair, reg.apply(design), inner, warm_start);
}

LineSearchResult line_search_alpha(const ModelPair& pair, const Design& design, const Vector& x_n,
                                   const InnerConfig& inner, double tolerance,
                                   const std::optional<InnerSolution>& current,
                                   const RegularizationConfig* regularization) {
  std::uint64_t stream = 0;
  const auto solve = [&](const Design& d, const std::optional<Vector>& warm) {
    return solve_phase(pair, d, regularization, with_seed(inner, derive_seed(inner.seed, stream++)), warm);
  };

  LineSearchResult best;
  best.alpha = 0.0;
  best.design = design;
  best.solution = current ? *current : solve(design, std::nullopt);
  best.value = best.solution.value;

  Vector warm = best.solution.beta2_hat;
  const auto evaluate = [&](double alpha) {
    Design mixed = mix_design(design, x_n, alpha);
    InnerSolution sol = solve(mixed, warm);
    warm = sol.beta2_hat;
    const double value = sol.value;
    if (value > best.value) {
      best.alpha = alpha;
      best.value = value;
      best.design = std::move(mixed);
      best.solution = std::move(sol);
    }
    return value;
  };

  double a = 0.0;
  double b = 1.0;
  double c = b - kGoldenRatio * (b - a);
  double d = a + kGoldenRatio * (b - a);
  double gc = evaluate(c);
  double gd = evaluate(d);
  while (b - a > tolerance) {
    if (gc >= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - kGoldenRatio * (b - a);
      gc = evaluate(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + kGoldenRatio * (b - a);
      gd = evaluate(d);
    }
  }
  // The maximizer of a concave g may sit exactly at the end point.
  if (b >= 1.0 - tolerance) evaluate(1.0);
  return best;
}

double efficiency_bound(double criterion_value, double psi_max) {
  if (!(criterion_value > 0.0)) {
    throw UndefinedEfficiencyError("efficiency bound is undefined for a non-positive criterion value");
  }
  return 1.0 / (1.0 + psi_max / criterion_value);
}

namespace {

RunResult run_loop(const ModelPair& pair, const Design& initial, const AlgoConfig& algo, const InnerConfig& inner,
                   std::optional<RegularizationConfig> reg) {
  algo.check();
  inner.check();
  require_valid(initial);
  if (initial.dim() != pair.space_dim()) throw DomainError("run: design and model dimensions differ");

  RunResult result;
  const int d2 = pair.rival_dim();
  const DesignSpace& space = initial.space;
  const double r0 = algo.collapse_radius_base.value_or(0.05 * space.diameter());
  std::uint64_t stream = 0;
  const auto next_inner = [&] { return with_seed(inner, derive_seed(algo.seed, stream++)); };

  const auto regularization_for_handoff = [&]() -> RegularizationConfig {
    if (algo.regularization) {
      algo.regularization->check(pair);
      return *algo.regularization;
    }
    return RegularizationConfig::with_default_reference(pair, space);
  };

  if (reg) {
    reg->check(pair);
    result.handoff_iteration = 0;
  } else if (pair.is_glm() && algo.allow_regularization &&
             !glm_is_regular(rival_design_matrix(pair, initial))) {
    result.diagnostics.push_back("initial design has a singular information matrix; starting regularized");
    reg = regularization_for_handoff();
    result.handoff_iteration = 0;
  }
  bool handed_off = false;

  Design xi = initial;
  InnerSolution sol = solve_phase(pair, xi, reg ? &*reg : nullptr, next_inner(), std::nullopt);
  int consecutive_singular = sol.singular_flag ? 1 : 0;

  const auto hand_off = [&](const std::string& why, int n) {
    result.diagnostics.push_back("iteration " + std::to_string(n) + ": " + why + "; switching to regularized criterion");
    reg = regularization_for_handoff();
    handed_off = true;
    result.handoff_iteration = n;
    sol = solve_phase(pair, xi, &*reg, next_inner(), sol.beta2_hat);
    consecutive_singular = 0;
  };

  for (int n = 0;; ++n) {
    if (!reg && algo.allow_regularization) {
      if (static_cast<int>(xi.size()) < d2) {
        hand_off("support has fewer than d2 points", n);
      } else if (consecutive_singular >= 2) {
        hand_off("inner minimizer not unique on two consecutive iterations", n);
      }
    }
    const double gamma = reg ? reg->gamma : 0.0;
    const SupportCandidate cand = best_support_candidate(pair, xi, sol.beta2_hat, algo);
    const double psi_max = (1.0 - gamma) * cand.psi_max;
    const double value = sol.value;
    const double efficiency = value > 0.0 ? efficiency_bound(value, psi_max) : 0.0;
    if (sol.boundary_hit) {
      result.diagnostics.push_back("iteration " + std::to_string(n) + ": inner minimizer on the parameter box boundary");
    }

    IterationRecord rec;
    rec.n = n;
    rec.design = xi;
    rec.beta2_hat = sol.beta2_hat;
    rec.value = value;
    rec.best_point = cand.point;
    rec.psi_max = psi_max;
    rec.efficiency = efficiency;
    rec.singular_flag = sol.singular_flag;
    rec.regularized = reg.has_value();
    result.history.push_back(rec);

    const auto finish = [&](Termination t) {
      result.termination = t;
      result.final_design = xi;
      result.final_beta2 = sol.beta2_hat;
      result.final_value = value;
      result.final_efficiency = efficiency;
      result.regularized = reg.has_value();
      result.gamma = gamma;
      result.final_unregularized_value =
          reg ? minimize_beta2(pair, xi, next_inner(), sol.beta2_hat).value : value;
      return result;
    };

    if (efficiency > algo.delta) {
      return finish(handed_off ? Termination::kStalledRegularized : Termination::kEfficiencyReached);
    }
    if (n >= algo.max_iterations) return finish(Termination::kMaxIterations);

    const InnerConfig ls_inner = next_inner();
    LineSearchResult ls =
        line_search_alpha(pair, xi, cand.point, ls_inner, algo.line_search_tolerance, sol, reg ? &*reg : nullptr);
    if (ls.alpha == 0.0) {
      const double psi_tolerance = 1e-9 * std::max(1.0, std::abs(value));
      if (!reg && algo.allow_regularization && psi_max > psi_tolerance) {
        hand_off("line search found no ascent (alpha = 0)", n + 1);
        continue;
      }
      return finish(Termination::kStalled);
    }
    result.history.back().alpha = ls.alpha;

    // Collapse around the new point and prune light points; a variant is
    // kept only if the criterion does not fall below the previous iterate.
    const double step = static_cast<double>(n + 1);
    const double radius = r0 * std::pow(step, -algo.collapse_radius_exponent);
    const double factor = std::pow(step, algo.anchor_weight_exponent);
    const Design collapsed = collapse_support(ls.design, cand.point, radius, factor);
    const Design variants[] = {prune_support(collapsed, algo.prune_abs, algo.prune_rel), collapsed,
                               prune_support(ls.design, algo.prune_abs, algo.prune_rel)};
    Design next = ls.design;
    InnerSolution next_sol = ls.solution;
    for (const Design& v : variants) {
      if (same_design(v, ls.design)) continue;
      InnerSolution s = solve_phase(pair, v, reg ? &*reg : nullptr, next_inner(), ls.solution.beta2_hat);
      if (s.value >= value) {
        next = v;
        next_sol = std::move(s);
        break;
      }
    }
    xi = std::move(next);
    sol = std::move(next_sol);
    consecutive_singular = sol.singular_flag ? consecutive_singular + 1 : 0;
  }
}

}  // namespace

RunResult run_first_order(const ModelPair& pair, const Design& initial, const AlgoConfig& algo,
                          const InnerConfig& inner) {
  return run_loop(pair, initial, algo, inner, std::nullopt);
}

RunResult run_regularized(const ModelPair& pair, const Design& initial, const AlgoConfig& algo,
                          const InnerConfig& inner, const RegularizationConfig& reg) {
  return run_loop(pair, initial, algo, inner, reg);
}

}  // namespace kld
