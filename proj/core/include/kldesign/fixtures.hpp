#pragma once

#include "kldesign/design.hpp"
#include "kldesign/models.hpp"
#include "kldesign/outer.hpp"

/// Built-in problems with known answers.
namespace kld::fixtures {

/// Cubic mean x^3 against a free quadratic, sigma2 = 1/2, on [-1, 1].
/// The divergence is (x^3 - b0 - b1 x - b2 x^2)^2; the optimum design sits on
/// the extrema of the Chebyshev polynomial T3 with rival fit (0, 3/4, 0).
ModelPair chebyshev_pair();
DesignSpace chebyshev_space();
/// {-1, -1/2, 1/2, 1} with weights {1/6, 1/3, 1/3, 1/6}; criterion 1/16.
Design chebyshev_optimum();
/// Uniform weights on {-1, -0.6, 0.1, 0.8}.
Design chebyshev_start();
inline constexpr double kChebyshevOptimumValue = 1.0 / 16.0;

/// z = 2 + 4x maps [-1, 1] onto [-2, 6].
AffineMap chebyshev_shift();

/// Logistic true predictor 1 + x + x^2 against the intercept-free rival
/// b1 x + b2 x^2 on [0, 1]. The coefficients of the true model are a chosen
/// value; the KL-optimum is the singular design delta_0.
ModelPair logistic_pair();
DesignSpace logistic_space();
/// Uniform weights on {0, 1/3, 2/3, 1}.
Design logistic_start();
/// gamma = 0.05 with reference uniform on {0, 1/3, 2/3, 1}.
RegularizationConfig logistic_regularization();

/// Synthetic family on [0, 1] with the given parameter box.
ModelPair synthetic_pair(double lower = 1e-6, double upper = 1000.0);

}  // namespace kld::fixtures
