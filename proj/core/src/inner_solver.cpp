#include "kldesign/inner_solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "kldesign/nelder_mead.hpp"
#include "kldesign/parallel.hpp"

namespace kld {
namespace {

constexpr int kMaxRestarts = 4;
constexpr int kPolishSteps = 3;
constexpr double kTieTolerance = 1e-8;

// Newton step on a central-difference quadratic model. Returns the improved
// point, or nothing if the model is not positive definite or the step does
// not help.
std::optional<LocalMinimum> newton_polish(const std::function<double(const Vector&)>& f, const LocalMinimum& at,
                                          const ParamBox& box) {
  const Eigen::Index d = at.beta2.size();
  Vector h(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    h(j) = std::max(1e-4 * std::abs(at.beta2(j)), 1e-5 * (box.upper(j) - box.lower(j)));
    if (at.beta2(j) - 2 * h(j) < box.lower(j) || at.beta2(j) + 2 * h(j) > box.upper(j)) return std::nullopt;
  }
  const double f0 = at.value;
  Vector grad(d);
  Matrix hess(d, d);
  Vector fp(d), fm(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    Vector e = Vector::Zero(d);
    e(j) = h(j);
    fp(j) = f(at.beta2 + e);
    fm(j) = f(at.beta2 - e);
    grad(j) = (fp(j) - fm(j)) / (2 * h(j));
    hess(j, j) = (fp(j) - 2 * f0 + fm(j)) / (h(j) * h(j));
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      Vector a = at.beta2, b = at.beta2, c = at.beta2, e = at.beta2;
      a(i) += h(i), a(j) += h(j);
      b(i) += h(i), b(j) -= h(j);
      c(i) -= h(i), c(j) += h(j);
      e(i) -= h(i), e(j) -= h(j);
      hess(i, j) = hess(j, i) = (f(a) - f(b) - f(c) + f(e)) / (4 * h(i) * h(j));
    }
  }
  Eigen::LLT<Matrix> llt(hess);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Vector candidate = box.clip(at.beta2 - llt.solve(grad));
  if (!candidate.allFinite()) return std::nullopt;
  const double value = f(candidate);
  if (!(value <= f0)) return std::nullopt;
  return LocalMinimum{candidate, value};
}

LocalMinimum local_solve(const std::function<double(const Vector&)>& f, const Vector& start, const ParamBox& box,
                         const InnerConfig& config) {
  NelderMeadOptions options;
  options.x_tolerance = config.tolerance;
  options.max_iterations = config.max_local_iterations;
  NelderMeadResult r = nelder_mead_minimize(f, start, box.lower, box.upper, options);
  LocalMinimum best{r.x, r.value};

  // Restart from the best vertex with a fresh, smaller simplex; stops when a
  // restart no longer improves.
  options.initial_step = 1e-3;
  for (int k = 0; k < kMaxRestarts; ++k) {
    r = nelder_mead_minimize(f, best.beta2, box.lower, box.upper, options);
    if (!(r.value < best.value)) break;
    best = {r.x, r.value};
  }
  for (int k = 0; k < kPolishSteps; ++k) {
    auto polished = newton_polish(f, best, box);
    if (!polished || polished->value == best.value) break;
    best = *polished;
  }
  return best;
}

bool lexicographic_less(const Vector& a, const Vector& b) {
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (a(j) != b(j)) return a(j) < b(j);
  }
  return false;
}

}  // namespace

void InnerConfig::check() const {
  if (multistart_count < 1) throw DomainError("inner config: multistart_count must be >= 1");
  if (!(tolerance > 0.0)) throw DomainError("inner config: tolerance must be positive");
  if (max_local_iterations < 1) throw DomainError("inner config: max_local_iterations must be >= 1");
  if (!(warm_start_noise_scale >= 0.0)) throw DomainError("inner config: warm_start_noise_scale must be >= 0");
  if (dispersion_threshold && !(*dispersion_threshold > 0.0)) {
    throw DomainError("inner config: dispersion_threshold must be positive");
  }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  // splitmix64 finalizer over the combined state
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

InnerSolution minimize_beta2(const ModelPair& pair, const Design& design, const InnerConfig& config,
                             const std::optional<Vector>& warm_start) {
  config.check();
  if (design.empty()) throw DomainError("minimize_beta2: empty design");
  const ParamBox& box = pair.param_box();
  const Eigen::Index d = box.dim();

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vector> starts;
  if (warm_start) {
    if (warm_start->size() != d) throw DomainError("minimize_beta2: warm start has the wrong dimension");
    Vector w = box.clip(*warm_start);
    for (Eigen::Index j = 0; j < d; ++j) {
      w(j) += (2.0 * unit(rng) - 1.0) * config.warm_start_noise_scale * (std::abs(w(j)) + 0.01);
    }
    starts.push_back(box.clip(w));
  }
  while (static_cast<int>(starts.size()) < config.multistart_count) {
    Vector s(d);
    for (Eigen::Index j = 0; j < d; ++j) s(j) = box.lower(j) + unit(rng) * (box.upper(j) - box.lower(j));
    starts.push_back(s);
  }

  const auto objective = [&](const Vector& beta2) { return kl_average(pair, design, beta2); };
  std::vector<LocalMinimum> minima(starts.size());
  const int n_starts = static_cast<int>(starts.size());
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (n_starts > 1 && thread_count() > 1)
  for (int k = 0; k < n_starts; ++k) {
    minima[static_cast<std::size_t>(k)] = local_solve(objective, starts[static_cast<std::size_t>(k)], box, config);
  }

  std::sort(minima.begin(), minima.end(), [](const LocalMinimum& a, const LocalMinimum& b) {
    if (a.value != b.value) return a.value < b.value;
    return lexicographic_less(a.beta2, b.beta2);
  });

  InnerSolution sol;
  sol.beta2_hat = minima.front().beta2;
  sol.value = kl_average(pair, design, sol.beta2_hat);
  const double tie = kTieTolerance * std::max(std::abs(sol.value), 1e-300);
  for (std::size_t a = 0; a < minima.size(); ++a) {
    if (minima[a].value - sol.value > tie) break;
    for (std::size_t b = 0; b < a; ++b) {
      sol.dispersion = std::max(sol.dispersion, (minima[a].beta2 - minima[b].beta2).norm());
    }
  }
  sol.all_minima = std::move(minima);
  sol.singular_flag = sol.dispersion > config.dispersion_threshold.value_or(1e-3 * box.diameter());
  const Vector width = box.upper - box.lower;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (sol.beta2_hat(j) - box.lower(j) <= 1e-9 * width(j) || box.upper(j) - sol.beta2_hat(j) <= 1e-9 * width(j)) {
      sol.boundary_hit = true;
    }
  }
  return sol;
}

double criterion_value(const ModelPair& pair, const Design& design, const InnerConfig& config,
                       const std::optional<Vector>& warm_start) {
  return minimize_beta2(pair, design, config, warm_start).value;
}

LeastSquaresFit gaussian_least_squares_oracle(const ModelPair& pair, const Design& design) {
  if (pair.kind() != DivergenceKind::kGaussianRegression) {
    throw UnsupportedModelError("least-squares oracle requires a Gaussian pair");
  }
  const Matrix X = rival_design_matrix(pair, design);
  Vector y(X.rows());
  Vector sqrt_w(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    y(i) = pair.true_predictor()(design.points[static_cast<std::size_t>(i)]);
    sqrt_w(i) = std::sqrt(design.weights[static_cast<std::size_t>(i)]);
  }
  const Matrix Xw = sqrt_w.asDiagonal() * X;
  const Vector yw = sqrt_w.asDiagonal() * y;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(Xw);
  cod.setThreshold(1e-12);
  LeastSquaresFit fit;
  fit.beta2 = cod.solve(yw);
  fit.value = (yw - Xw * fit.beta2).squaredNorm() / (2.0 * pair.sigma2());
  return fit;
}

}  // namespace kld
