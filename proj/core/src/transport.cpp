#include "kldesign/transport.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace kld {
namespace {

constexpr double kPivotEps = 1e-12;

// Tableau with basis bookkeeping. Columns [0, n) are the structural and
// artificial variables, column n is the right-hand side.
struct Tableau {
  Matrix t;
  std::vector<int> basis;

  int rows() const { return static_cast<int>(t.rows()); }
  int rhs() const { return static_cast<int>(t.cols()) - 1; }

  void pivot(int r, int c) {
    t.row(r) /= t(r, c);
    for (int i = 0; i < rows(); ++i) {
      if (i != r && t(i, c) != 0.0) t.row(i) -= t(i, c) * t.row(r);
    }
    basis[r] = c;
  }
};

// Minimizes cost' x over the current tableau using Bland's rule, allowing
// only columns flagged in `allowed` to enter. Returns false if unbounded.
bool run_simplex(Tableau& tab, const Vector& cost, const std::vector<bool>& allowed) {
  const int n = tab.rhs();
  for (;;) {
    // reduced costs: c_j - c_B' B^{-1} A_j, with the tableau already holding B^{-1} A
    int entering = -1;
    for (int j = 0; j < n && entering < 0; ++j) {
      if (!allowed[j]) continue;
      double reduced = cost(j);
      for (int i = 0; i < tab.rows(); ++i) reduced -= cost(tab.basis[i]) * tab.t(i, j);
      if (reduced < -1e-11) entering = j;
    }
    if (entering < 0) return true;

    int leaving = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < tab.rows(); ++i) {
      const double a = tab.t(i, entering);
      if (a <= kPivotEps) continue;
      const double ratio = tab.t(i, n) / a;
      if (ratio < best_ratio - 1e-15 ||
          (std::abs(ratio - best_ratio) <= 1e-15 && leaving >= 0 && tab.basis[i] < tab.basis[leaving])) {
        best_ratio = ratio;
        leaving = i;
      }
    }
    if (leaving < 0) return false;
    tab.pivot(leaving, entering);
  }
}

}  // namespace

LinearProgramResult solve_standard_form_lp(const Matrix& A, const Vector& b, const Vector& c) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  if (b.size() != m || c.size() != n) throw DomainError("solve_standard_form_lp: shape mismatch");

  Tableau tab;
  tab.t = Matrix::Zero(m, n + m + 1);
  tab.basis.resize(m);
  for (int i = 0; i < m; ++i) {
    const double sign = b(i) < 0 ? -1.0 : 1.0;
    tab.t.row(i).head(n) = sign * A.row(i);
    tab.t(i, n + i) = 1.0;
    tab.t(i, n + m) = sign * b(i);
    tab.basis[i] = n + i;
  }

  // Phase 1: minimize the sum of artificials.
  Vector phase1_cost = Vector::Zero(n + m);
  phase1_cost.tail(m).setOnes();
  std::vector<bool> allowed(n + m, true);
  run_simplex(tab, phase1_cost, allowed);

  double infeasibility = 0.0;
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] >= n) infeasibility += tab.t(i, n + m);
  }
  LinearProgramResult result;
  if (infeasibility > 1e-9 * std::max(1.0, b.cwiseAbs().sum())) return result;

  // Drive zero-level artificials out of the basis; rows that cannot be
  // pivoted are redundant and are dropped.
  std::vector<int> keep;
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] >= n) {
      int col = -1;
      for (int j = 0; j < n && col < 0; ++j) {
        if (std::abs(tab.t(i, j)) > 1e-9) col = j;
      }
      if (col < 0) continue;
      tab.pivot(i, col);
    }
    keep.push_back(i);
  }
  if (static_cast<int>(keep.size()) < m) {
    Tableau reduced;
    reduced.t.resize(static_cast<Eigen::Index>(keep.size()), tab.t.cols());
    for (std::size_t k = 0; k < keep.size(); ++k) {
      reduced.t.row(static_cast<Eigen::Index>(k)) = tab.t.row(keep[k]);
      reduced.basis.push_back(tab.basis[keep[k]]);
    }
    tab = std::move(reduced);
  }

  // Phase 2 over structural columns only.
  Vector phase2_cost = Vector::Zero(n + m);
  phase2_cost.head(n) = c;
  std::fill(allowed.begin() + n, allowed.end(), false);
  if (!run_simplex(tab, phase2_cost, allowed)) return result;

  result.x = Vector::Zero(n);
  for (int i = 0; i < tab.rows(); ++i) {
    if (tab.basis[i] < n) result.x(tab.basis[i]) = std::max(0.0, tab.t(i, n + m));
  }
  result.objective = c.dot(result.x);
  result.feasible = true;
  return result;
}

TransportPlan solve_transport(const Matrix& cost, std::span<const double> supply,
                              std::span<const double> demand) {
  const auto ns = static_cast<Eigen::Index>(supply.size());
  const auto nd = static_cast<Eigen::Index>(demand.size());
  if (cost.rows() != ns || cost.cols() != nd) throw DomainError("solve_transport: cost shape mismatch");
  const double total_s = std::accumulate(supply.begin(), supply.end(), 0.0);
  const double total_d = std::accumulate(demand.begin(), demand.end(), 0.0);
  if (std::abs(total_s - total_d) > 1e-9) throw DomainError("solve_transport: unbalanced problem");

  // Variables flow(i, j) stored row-major at i * nd + j.
  Matrix A = Matrix::Zero(ns + nd, ns * nd);
  Vector b(ns + nd);
  Vector c(ns * nd);
  for (Eigen::Index i = 0; i < ns; ++i) {
    for (Eigen::Index j = 0; j < nd; ++j) {
      const Eigen::Index k = i * nd + j;
      A(i, k) = 1.0;
      A(ns + j, k) = 1.0;
      c(k) = cost(i, j);
    }
    b(i) = supply[static_cast<std::size_t>(i)];
  }
  for (Eigen::Index j = 0; j < nd; ++j) b(ns + j) = demand[static_cast<std::size_t>(j)];

  const LinearProgramResult lp = solve_standard_form_lp(A, b, c);
  if (!lp.feasible) throw DomainError("solve_transport: LP infeasible");

  TransportPlan plan;
  plan.flow.resize(ns, nd);
  for (Eigen::Index i = 0; i < ns; ++i) {
    for (Eigen::Index j = 0; j < nd; ++j) plan.flow(i, j) = lp.x(i * nd + j);
  }
  plan.cost = lp.objective;
  return plan;
}

}  // namespace kld
