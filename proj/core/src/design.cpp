#include "kldesign/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "kldesign/transport.hpp"

namespace kld {
namespace {

std::string format_point(const Vector& x) {
  std::ostringstream os;
  os << '(';
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
  os << ')';
  return os.str();
}

void check_same_dim(const Design& a, const Design& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw DomainError(std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) +
                      " vs " + std::to_string(b.dim()) + ")");
  }
}

// Adds weight w at x, merging with a coincident support point.
void accumulate(Design& d, const Vector& x, double w) {
  const int idx = d.find_point(x);
  if (idx >= 0) {
    d.weights[static_cast<std::size_t>(idx)] += w;
  } else {
    d.points.push_back(x);
    d.weights.push_back(w);
  }
}

}  // namespace

bool DesignSpace::contains(const Vector& x, double slack) const {
  if (x.size() != lower.size()) return false;
  return ((x.array() >= lower.array() - slack) && (x.array() <= upper.array() + slack)).all();
}

Vector DesignSpace::clip(const Vector& x) const { return x.cwiseMax(lower).cwiseMin(upper); }

double DesignSpace::diameter() const { return (upper - lower).norm(); }

void DesignSpace::check() const {
  if (lower.size() < 1) throw DomainError("design space: dimension must be at least 1");
  if (lower.size() != upper.size()) throw DomainError("design space: lower/upper size mismatch");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower(i) < upper(i))) {
      throw DomainError("design space: lower[" + std::to_string(i) + "] must be < upper[" +
                        std::to_string(i) + "]");
    }
  }
}

DesignSpace DesignSpace::interval(double lo, double hi) {
  return DesignSpace{Vector::Constant(1, lo), Vector::Constant(1, hi)};
}

int Design::find_point(const Vector& x) const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() == x.size() && (points[i] - x).cwiseAbs().maxCoeff() <= kDuplicateTolerance) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

Design Design::point_mass(const DesignSpace& space, const Vector& x) {
  return Design{space, {x}, {1.0}};
}

Design Design::uniform(const DesignSpace& space, std::vector<Vector> points) {
  const std::size_t n = points.size();
  return Design{space, std::move(points), std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

Design Design::on_line(const DesignSpace& space, std::span<const double> points,
                       std::span<const double> weights) {
  Design d{space, {}, {weights.begin(), weights.end()}};
  for (double p : points) d.points.push_back(Vector::Constant(1, p));
  return d;
}

ValidationReport validate_design(const Design& design) {
  ValidationReport report;
  auto& v = report.violations;
  const DesignSpace& space = design.space;

  if (space.lower.size() < 1 || space.lower.size() != space.upper.size()) {
    v.push_back("space: malformed bounds");
    return report;
  }
  for (Eigen::Index i = 0; i < space.lower.size(); ++i) {
    if (!(space.lower(i) < space.upper(i))) v.push_back("space: lower[" + std::to_string(i) + "] >= upper");
  }
  if (design.points.empty()) v.push_back("design has no support points");
  if (design.points.size() != design.weights.size()) {
    v.push_back("points/weights length mismatch (" + std::to_string(design.points.size()) + " vs " +
                std::to_string(design.weights.size()) + ")");
    return report;
  }

  double total = 0.0;
  for (std::size_t i = 0; i < design.points.size(); ++i) {
    const Vector& x = design.points[i];
    if (x.size() != space.dim()) {
      v.push_back("point " + std::to_string(i) + " has dimension " + std::to_string(x.size()));
      continue;
    }
    if (!x.allFinite() || !space.contains(x)) {
      v.push_back("point " + std::to_string(i) + " " + format_point(x) + " outside the design space");
    }
    const double w = design.weights[i];
    if (!std::isfinite(w) || w < 0.0) v.push_back("weight " + std::to_string(i) + " is negative or non-finite");
    total += w;
    for (std::size_t j = 0; j < i; ++j) {
      if (design.points[j].size() == x.size() &&
          (design.points[j] - x).cwiseAbs().maxCoeff() <= kDuplicateTolerance) {
        v.push_back("points " + std::to_string(j) + " and " + std::to_string(i) + " coincide");
      }
    }
  }
  if (!design.points.empty() && std::abs(total - 1.0) > kFeasibilityTolerance) {
    std::ostringstream os;
    os.precision(15);
    os << "weight sum " << total << " != 1";
    v.push_back(os.str());
  }
  return report;
}

void require_valid(const Design& design) {
  const ValidationReport report = validate_design(design);
  if (report.ok()) return;
  std::string msg = "invalid design:";
  for (const auto& s : report.violations) msg += " " + s + ";";
  throw DomainError(msg);
}

Design mix_design(const Design& design, const Vector& new_point, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("mix_design: alpha must lie in [0, 1]");
  if (!design.space.contains(new_point)) {
    throw DomainError("mix_design: point " + format_point(new_point) + " outside the design space");
  }
  if (alpha == 0.0) return design;

  Design out{design.space, {}, {}};
  out.points.reserve(design.size() + 1);
  for (std::size_t i = 0; i < design.size(); ++i) {
    out.points.push_back(design.points[i]);
    out.weights.push_back((1.0 - alpha) * design.weights[i]);
  }
  accumulate(out, new_point, alpha);
  if (alpha == 1.0) return Design::point_mass(design.space, new_point);
  return out;
}

Design mix_designs(const Design& first, const Design& second, double t) {
  check_same_dim(first, second, "mix_designs");
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("mix_designs: t must lie in [0, 1]");
  Design out{first.space, {}, {}};
  for (std::size_t i = 0; i < first.size(); ++i) accumulate(out, first.points[i], (1.0 - t) * first.weights[i]);
  for (std::size_t i = 0; i < second.size(); ++i) accumulate(out, second.points[i], t * second.weights[i]);
  return out;
}

Design collapse_support(const Design& design, const Vector& anchor, double radius,
                        double anchor_weight_factor) {
  if (!(radius > 0.0)) throw DomainError("collapse_support: radius must be positive");
  if (!(anchor_weight_factor >= 1.0)) throw DomainError("collapse_support: anchor weight factor must be >= 1");

  std::vector<std::size_t> inside;
  for (std::size_t i = 0; i < design.size(); ++i) {
    if ((design.points[i] - anchor).norm() <= radius) inside.push_back(i);
  }
  if (inside.size() < 2) return design;

  Vector barycenter = Vector::Zero(anchor.size());
  double scaled_total = 0.0;
  double merged_weight = 0.0;
  for (std::size_t i : inside) {
    const bool is_anchor = (design.points[i] - anchor).cwiseAbs().maxCoeff() <= kDuplicateTolerance;
    const double w = design.weights[i] * (is_anchor ? anchor_weight_factor : 1.0);
    barycenter += w * design.points[i];
    scaled_total += w;
    merged_weight += design.weights[i];
  }
  barycenter = scaled_total > 0.0 ? Vector(barycenter / scaled_total) : anchor;
  barycenter = design.space.clip(barycenter);

  Design out{design.space, {}, {}};
  std::size_t next = 0;
  for (std::size_t i = 0; i < design.size(); ++i) {
    if (next < inside.size() && inside[next] == i) {
      ++next;
      continue;
    }
    out.points.push_back(design.points[i]);
    out.weights.push_back(design.weights[i]);
  }
  accumulate(out, barycenter, merged_weight);
  return out;
}

Design prune_support(const Design& design, double abs_threshold, double rel_threshold) {
  if (abs_threshold < 0.0 || rel_threshold < 0.0) throw DomainError("prune_support: thresholds must be >= 0");
  const std::size_t n = design.size();
  if (n == 0) return design;

  const double total = std::accumulate(design.weights.begin(), design.weights.end(), 0.0);
  std::vector<bool> keep(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = design.weights[i];
    const double mean_others = n > 1 ? (total - w) / static_cast<double>(n - 1) : w;
    if (w < abs_threshold || w < rel_threshold * mean_others) keep[i] = false;
  }
  if (std::none_of(keep.begin(), keep.end(), [](bool k) { return k; })) {
    const auto heaviest = std::max_element(design.weights.begin(), design.weights.end());
    keep[static_cast<std::size_t>(heaviest - design.weights.begin())] = true;
  }

  Design out{design.space, {}, {}};
  double kept = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    out.points.push_back(design.points[i]);
    out.weights.push_back(design.weights[i]);
    kept += design.weights[i];
  }
  for (double& w : out.weights) w /= kept;
  return out;
}

double wasserstein_distance_1d(const Design& first, const Design& second) {
  check_same_dim(first, second, "wasserstein_distance");
  if (first.dim() != 1) throw DomainError("wasserstein_distance_1d: designs must be one-dimensional");

  // Merge both supports, integrate |F1 - F2| between consecutive breakpoints.
  struct Atom {
    double x;
    double w;
  };
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < first.size(); ++i) atoms.push_back({first.points[i](0), first.weights[i]});
  for (std::size_t i = 0; i < second.size(); ++i) atoms.push_back({second.points[i](0), -second.weights[i]});
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });

  double distance = 0.0;
  double cdf_gap = 0.0;
  for (std::size_t k = 0; k + 1 < atoms.size(); ++k) {
    cdf_gap += atoms[k].w;
    distance += std::abs(cdf_gap) * (atoms[k + 1].x - atoms[k].x);
  }
  return distance;
}

double wasserstein_distance_lp(const Design& first, const Design& second) {
  check_same_dim(first, second, "wasserstein_distance");
  Matrix cost(static_cast<Eigen::Index>(first.size()), static_cast<Eigen::Index>(second.size()));
  for (std::size_t i = 0; i < first.size(); ++i) {
    for (std::size_t j = 0; j < second.size(); ++j) {
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          (first.points[i] - second.points[j]).norm();
    }
  }
  // Rescale the second marginal so rounding in the weight sums cannot make
  // the transport problem infeasible.
  const double s1 = std::accumulate(first.weights.begin(), first.weights.end(), 0.0);
  const double s2 = std::accumulate(second.weights.begin(), second.weights.end(), 0.0);
  std::vector<double> demand(second.weights);
  for (double& w : demand) w *= s1 / s2;
  return std::max(0.0, solve_transport(cost, first.weights, demand).cost);
}

double wasserstein_distance(const Design& first, const Design& second) {
  check_same_dim(first, second, "wasserstein_distance");
  return first.dim() == 1 ? wasserstein_distance_1d(first, second) : wasserstein_distance_lp(first, second);
}

AffineMap::AffineMap(Vector offset, Matrix matrix) : offset_(std::move(offset)), matrix_(std::move(matrix)) {
  const auto q = offset_.size();
  if (q < 1 || matrix_.rows() != q || matrix_.cols() != q) {
    throw DomainError("affine map: offset must have size q and matrix must be q x q");
  }
  // Row-normalized determinant so the singularity test is scale free.
  Matrix scaled = matrix_;
  for (Eigen::Index i = 0; i < q; ++i) {
    const double norm = scaled.row(i).norm();
    if (norm == 0.0) throw DomainError("affine map: matrix is singular (zero row)");
    scaled.row(i) /= norm;
  }
  if (!(std::abs(scaled.determinant()) > 1e-12)) throw DomainError("affine map: matrix is singular");
  inverse_ = matrix_.inverse();
}

AffineMap AffineMap::identity(int dim) { return AffineMap(Vector::Zero(dim), Matrix::Identity(dim, dim)); }

AffineMap AffineMap::scalar(double offset, double scale) {
  return AffineMap(Vector::Constant(1, offset), Matrix::Constant(1, 1, scale));
}

AffineMap AffineMap::inverse() const { return AffineMap(Vector(-inverse_ * offset_), inverse_); }

DesignSpace AffineMap::image(const DesignSpace& space) const {
  const int q = space.dim();
  Vector lo = Vector::Constant(q, std::numeric_limits<double>::infinity());
  Vector hi = -lo;
  for (unsigned mask = 0; mask < (1u << q); ++mask) {
    Vector corner(q);
    for (int i = 0; i < q; ++i) corner(i) = (mask >> i) & 1u ? space.upper(i) : space.lower(i);
    const Vector z = apply(corner);
    lo = lo.cwiseMin(z);
    hi = hi.cwiseMax(z);
  }
  return DesignSpace{lo, hi};
}

Design transform_design(const Design& design, const AffineMap& map) {
  if (map.dim() != design.dim()) throw DomainError("transform_design: dimension mismatch");
  Design out{map.image(design.space), {}, design.weights};
  out.points.reserve(design.size());
  for (const Vector& x : design.points) out.points.push_back(map.apply(x));
  return out;
}

}  // namespace kld
