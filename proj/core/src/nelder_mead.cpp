#include "kldesign/nelder_mead.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace kld {

NelderMeadResult nelder_mead_minimize(const std::function<double(const Vector&)>& f, const Vector& start,
                                      const Vector& lower, const Vector& upper,
                                      const NelderMeadOptions& options) {
  const Eigen::Index d = start.size();
  const Vector width = upper - lower;
  auto project = [&](const Vector& x) -> Vector { return x.cwiseMax(lower).cwiseMin(upper); };

  std::vector<Vector> simplex;
  std::vector<double> values;
  simplex.push_back(project(start));
  for (Eigen::Index i = 0; i < d; ++i) {
    Vector v = simplex.front();
    const double step = options.initial_step * width(i);
    v(i) += (v(i) + step <= upper(i)) ? step : -step;
    simplex.push_back(project(v));
  }
  for (const Vector& v : simplex) values.push_back(f(v));

  std::vector<std::size_t> order(simplex.size());
  NelderMeadResult result;
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  };

  int it = 0;
  for (; it < options.max_iterations; ++it) {
    sort_simplex();
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];

    double size = 0.0;
    for (const Vector& v : simplex) {
      size = std::max(size, ((v - simplex[best]).cwiseAbs().array() / width.array()).maxCoeff());
    }
    if (size <= options.x_tolerance) {
      result.converged = true;
      break;
    }

    Vector centroid = Vector::Zero(d);
    for (std::size_t k = 0; k < simplex.size(); ++k) {
      if (k != worst) centroid += simplex[k];
    }
    centroid /= static_cast<double>(d);

    const Vector reflected = project(centroid + (centroid - simplex[worst]));
    const double f_reflected = f(reflected);
    if (f_reflected < values[best]) {
      const Vector expanded = project(centroid + 2.0 * (centroid - simplex[worst]));
      const double f_expanded = f(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < values[worst];
    const Vector contracted = outside ? Vector(project(centroid + 0.5 * (reflected - centroid)))
                                      : Vector(project(centroid + 0.5 * (simplex[worst] - centroid)));
    const double f_contracted = f(contracted);
    if (f_contracted < (outside ? f_reflected : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }
    // shrink towards the best vertex
    for (std::size_t k = 0; k < simplex.size(); ++k) {
      if (k == best) continue;
      simplex[k] = simplex[best] + 0.5 * (simplex[k] - simplex[best]);
      values[k] = f(simplex[k]);
    }
  }

  sort_simplex();
  result.x = simplex[order.front()];
  result.value = values[order.front()];
  result.iterations = it;
  return result;
}

}  // namespace kld
