#pragma once

#include <span>
#include <string>
#include <vector>

#include "kldesign/types.hpp"

namespace kld {

/// Two support points closer than this in max-norm are the same point.
inline constexpr double kDuplicateTolerance = 1e-12;
/// Slack for box membership and for the weight-sum check.
inline constexpr double kFeasibilityTolerance = 1e-12;

/// Compact box [lower, upper] in R^q.
struct DesignSpace {
  Vector lower;
  Vector upper;

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Vector& x, double slack = kFeasibilityTolerance) const;
  Vector clip(const Vector& x) const;
  /// Euclidean length of the box diagonal.
  double diameter() const;

  /// Throws DomainError unless q >= 1 and lower < upper componentwise.
  void check() const;

  static DesignSpace interval(double lo, double hi);
};

/// Finite-support probability measure on a DesignSpace.
///
/// Designs are plain values; operations below return new designs. A Design
/// may be constructed in an invalid state (for instance straight from a
/// file) and checked with validate_design().
struct Design {
  DesignSpace space;
  std::vector<Vector> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  int dim() const { return space.dim(); }

  /// Index of the support point within kDuplicateTolerance of x, or -1.
  int find_point(const Vector& x) const;

  static Design point_mass(const DesignSpace& space, const Vector& x);
  static Design uniform(const DesignSpace& space, std::vector<Vector> points);
  /// One-dimensional convenience constructor.
  static Design on_line(const DesignSpace& space, std::span<const double> points,
                        std::span<const double> weights);
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_design(const Design& design);

/// Throws DomainError listing every violation when the design is invalid.
void require_valid(const Design& design);

/// (1 - alpha) * design + alpha * delta_{new_point}; coincident points merge.
Design mix_design(const Design& design, const Vector& new_point, double alpha);

/// (1 - t) * first + t * second on the space of `first`; coincident points merge.
Design mix_designs(const Design& first, const Design& second, double t);

/// Replaces all support points within `radius` of `anchor` by their weighted
/// barycenter. The support point sitting at the anchor has its weight scaled by
/// anchor_weight_factor in the barycenter only; the merged weight is the plain
/// sum. The barycenter is clipped to the box.
Design collapse_support(const Design& design, const Vector& anchor, double radius,
                        double anchor_weight_factor);

/// Drops points with weight < abs_threshold or < rel_threshold * (mean weight
/// of the other points), then renormalizes. The heaviest point always survives.
Design prune_support(const Design& design, double abs_threshold, double rel_threshold);

/// Order-1 Kantorovich-Wasserstein distance with Euclidean ground cost.
/// One-dimensional designs use the CDF formula, others the transport LP.
double wasserstein_distance(const Design& first, const Design& second);

/// CDF formula: integral of |F1 - F2|. Requires q = 1.
double wasserstein_distance_1d(const Design& first, const Design& second);

/// Exact optimal transport LP on the support cost matrix, any q.
double wasserstein_distance_lp(const Design& first, const Design& second);

/// Affine change of experimental coordinates z = offset + matrix * x.
class AffineMap {
 public:
  /// Throws DomainError if the matrix is singular or shapes disagree.
  AffineMap(Vector offset, Matrix matrix);

  static AffineMap identity(int dim);
  static AffineMap scalar(double offset, double scale);

  const Vector& offset() const { return offset_; }
  const Matrix& matrix() const { return matrix_; }
  const Matrix& inverse_matrix() const { return inverse_; }
  int dim() const { return static_cast<int>(offset_.size()); }

  Vector apply(const Vector& x) const { return offset_ + matrix_ * x; }
  Vector apply_inverse(const Vector& z) const { return inverse_ * (z - offset_); }
  AffineMap inverse() const;

  /// Bounding box of the image of `space` (exact when the matrix is diagonal).
  DesignSpace image(const DesignSpace& space) const;

 private:
  Vector offset_;
  Matrix matrix_;
  Matrix inverse_;
};

/// Pushes the support through the map; weights are unchanged.
Design transform_design(const Design& design, const AffineMap& map);

}  // namespace kld
