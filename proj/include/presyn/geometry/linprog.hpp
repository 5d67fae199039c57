#pragma once

#include <Eigen/Dense>

namespace presyn::geom {

enum class LpStatus { Optimal, Infeasible, Unbounded };

/// Result of a linear program over free variables:
///   maximize c.x  subject to  A x <= b.
/// `value` and `point` are meaningful only when status == Optimal.
struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  Eigen::VectorXd point;
};

struct LpOptions {
  double pivot_tol = 1e-9;   // entries below this are treated as zero when pivoting
  double feas_tol = 1e-8;    // phase-1 objective above this means infeasible
  int max_pivots = 50000;    // hard cap; exceeded -> SolverError
};

/// Dense two-phase primal simplex. Variables are free (split internally).
/// Throws SolverError if the pivot cap is hit (cycling guard is Bland's rule,
/// so this indicates a genuinely broken input).
LpOutcome solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                   const Eigen::VectorXd& c, const LpOptions& opts = {});

}  // namespace presyn::geom
