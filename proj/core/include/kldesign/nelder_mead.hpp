#pragma once

#include <functional>

#include "kldesign/types.hpp"

namespace kld {

struct NelderMeadOptions {
  /// Initial simplex edge as a fraction of each box side.
  double initial_step = 0.05;
  /// Converged when every vertex is within this fraction of the box side of the best.
  double x_tolerance = 1e-10;
  int max_iterations = 2000;
};

struct NelderMeadResult {
  Vector x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead on the box [lower, upper]; trial points are projected onto
/// the box. Uses the standard coefficients (1, 2, 1/2, 1/2).
NelderMeadResult nelder_mead_minimize(const std::function<double(const Vector&)>& f, const Vector& start,
                                      const Vector& lower, const Vector& upper,
                                      const NelderMeadOptions& options = {});

}  // namespace kld
