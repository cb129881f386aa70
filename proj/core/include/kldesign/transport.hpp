#pragma once

#include <span>

#include "kldesign/types.hpp"

namespace kld {

struct LinearProgramResult {
  Vector x;
  double objective = 0.0;
  bool feasible = false;
};

/// Dense two-phase simplex for  min c'x  s.t.  A x = b, x >= 0.
/// Bland's rule is used throughout so degenerate problems terminate.
/// Rows with negative right-hand side are negated internally.
LinearProgramResult solve_standard_form_lp(const Matrix& A, const Vector& b, const Vector& c);

struct TransportPlan {
  Matrix flow;  // supply.size() x demand.size()
  double cost = 0.0;
};

/// Balanced transportation problem with the given cost matrix. Supply and
/// demand must be non-negative with equal totals (within 1e-9).
TransportPlan solve_transport(const Matrix& cost, std::span<const double> supply,
                              std::span<const double> demand);

}  // namespace kld
