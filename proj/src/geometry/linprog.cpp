#include "presyn/geometry/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "presyn/errors.hpp"

namespace presyn::geom {

namespace {

// Dense simplex tableau kept in canonical form: basis columns are unit columns.
// Column layout for the standard-form problem derived from {max c.x : Ax <= b, x free}:
//   [0, n)        x+   (positive part)
//   [n, 2n)       x-   (negative part)
//   [2n, 2n+m)    slack
//   [2n+m, ...)   artificial (phase 1 only, for rows with b < 0)
struct Tableau {
  Eigen::MatrixXd T;       // m x ncols
  Eigen::VectorXd rhs;     // m, kept >= 0
  Eigen::RowVectorXd obj;  // reduced cost row, length ncols
  std::vector<int> basis;  // per row: basic column
  int pivots = 0;

  void pivot(int r, int col) {
    const double piv = T(r, col);
    T.row(r) /= piv;
    rhs(r) /= piv;
    for (int i = 0; i < T.rows(); ++i) {
      if (i == r) continue;
      const double f = T(i, col);
      if (f != 0.0) {
        T.row(i) -= f * T.row(r);
        rhs(i) -= f * rhs(r);
        if (rhs(i) < 0.0 && rhs(i) > -1e-11) rhs(i) = 0.0;
      }
    }
    const double fo = obj(col);
    if (fo != 0.0) obj -= fo * T.row(r);
    basis[r] = col;
  }

  // Maximize obj over the current columns. Returns false on unboundedness.
  bool run(const LpOptions& opts, int bland_after) {
    const int ncols = static_cast<int>(T.cols());
    while (true) {
      if (++pivots > opts.max_pivots)
        throw SolverError("simplex pivot limit exceeded");
      const bool bland = pivots > bland_after;

      int enter = -1;
      double best = opts.pivot_tol;
      for (int j = 0; j < ncols; ++j) {
        if (obj(j) > best) {
          enter = j;
          if (bland) break;  // first improving column
          best = obj(j);
        }
      }
      if (enter < 0) return true;  // optimal

      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < T.rows(); ++i) {
        const double a = T(i, enter);
        if (a <= opts.pivot_tol) continue;
        const double ratio = std::max(rhs(i), 0.0) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && leave >= 0 &&
             basis[i] < basis[leave])) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave < 0) return false;  // unbounded in `enter` direction
      pivot(leave, enter);
    }
  }

  // Rebuild the reduced-cost row for a fresh cost vector over the current basis.
  void reset_objective(const Eigen::RowVectorXd& cost) {
    obj = cost;
    for (int i = 0; i < T.rows(); ++i) {
      const double cb = cost(basis[i]);
      if (cb != 0.0) obj -= cb * T.row(i);
    }
    // Basis columns must price to zero exactly.
    for (int i = 0; i < T.rows(); ++i) obj(basis[i]) = 0.0;
  }
};

}  // namespace

LpOutcome solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                   const Eigen::VectorXd& c, const LpOptions& opts) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  if (b.size() != m) throw DimensionError("solve_lp: A rows vs b length");
  if (c.size() != n) throw DimensionError("solve_lp: A cols vs c length");

  LpOutcome out;
  if (n == 0) {
    out.status = (m == 0 || b.minCoeff() >= -opts.feas_tol)
                     ? LpStatus::Optimal
                     : LpStatus::Infeasible;
    out.value = 0.0;
    out.point = Eigen::VectorXd(0);
    return out;
  }
  if (m == 0) {
    if (c.lpNorm<Eigen::Infinity>() > opts.pivot_tol) {
      out.status = LpStatus::Unbounded;
    } else {
      out.status = LpStatus::Optimal;
      out.value = 0.0;
      out.point = Eigen::VectorXd::Zero(n);
    }
    return out;
  }

  std::vector<int> art_rows;
  for (int i = 0; i < m; ++i)
    if (b(i) < 0.0) art_rows.push_back(i);
  const int nart = static_cast<int>(art_rows.size());
  const int nslack = m;
  const int ncols_p1 = 2 * n + nslack + nart;

  Tableau tab;
  tab.T = Eigen::MatrixXd::Zero(m, ncols_p1);
  tab.rhs = Eigen::VectorXd(m);
  tab.basis.resize(m);

  int art = 0;
  for (int i = 0; i < m; ++i) {
    const double sgn = (b(i) < 0.0) ? -1.0 : 1.0;
    tab.T.row(i).segment(0, n) = sgn * A.row(i);
    tab.T.row(i).segment(n, n) = -sgn * A.row(i);
    tab.T(i, 2 * n + i) = sgn;
    tab.rhs(i) = sgn * b(i);
    if (b(i) < 0.0) {
      tab.T(i, 2 * n + nslack + art) = 1.0;
      tab.basis[i] = 2 * n + nslack + art;
      ++art;
    } else {
      tab.basis[i] = 2 * n + i;
    }
  }

  const int bland_after = 2000 + 20 * (m + n);

  if (nart > 0) {
    Eigen::RowVectorXd cost1 = Eigen::RowVectorXd::Zero(ncols_p1);
    for (int j = 2 * n + nslack; j < ncols_p1; ++j) cost1(j) = -1.0;
    tab.reset_objective(cost1);
    if (!tab.run(opts, bland_after))
      throw SolverError("phase-1 objective unbounded (cannot happen)");

    double infeas = 0.0;
    for (int i = 0; i < m; ++i)
      if (tab.basis[i] >= 2 * n + nslack) infeas += std::max(tab.rhs(i), 0.0);
    if (infeas > opts.feas_tol) {
      out.status = LpStatus::Infeasible;
      return out;
    }

    // Drive residual artificials out of the basis; rows that cannot pivot are
    // linearly dependent on the others and get dropped.
    std::vector<int> drop;
    for (int i = 0; i < m; ++i) {
      if (tab.basis[i] < 2 * n + nslack) continue;
      int col = -1;
      double best = opts.pivot_tol;
      for (int j = 0; j < 2 * n + nslack; ++j) {
        if (std::abs(tab.T(i, j)) > best) {
          best = std::abs(tab.T(i, j));
          col = j;
        }
      }
      if (col >= 0)
        tab.pivot(i, col);
      else
        drop.push_back(i);
    }
    if (!drop.empty()) {
      const int keep = m - static_cast<int>(drop.size());
      Eigen::MatrixXd T2(keep, ncols_p1);
      Eigen::VectorXd r2(keep);
      std::vector<int> b2;
      b2.reserve(keep);
      int k = 0;
      for (int i = 0; i < m; ++i) {
        if (std::find(drop.begin(), drop.end(), i) != drop.end()) continue;
        T2.row(k) = tab.T.row(i);
        r2(k) = tab.rhs(i);
        b2.push_back(tab.basis[i]);
        ++k;
      }
      tab.T = std::move(T2);
      tab.rhs = std::move(r2);
      tab.basis = std::move(b2);
    }
  }

  // Phase 2: drop artificial columns, install the real objective.
  const int ncols_p2 = 2 * n + nslack;
  tab.T.conservativeResize(Eigen::NoChange, ncols_p2);
  Eigen::RowVectorXd cost2 = Eigen::RowVectorXd::Zero(ncols_p2);
  cost2.segment(0, n) = c.transpose();
  cost2.segment(n, n) = -c.transpose();
  tab.reset_objective(cost2);

  if (!tab.run(opts, bland_after)) {
    out.status = LpStatus::Unbounded;
    return out;
  }

  std::vector<double> colval(ncols_p2, 0.0);
  for (int i = 0; i < tab.T.rows(); ++i) colval[tab.basis[i]] = tab.rhs(i);
  Eigen::VectorXd x(n);
  for (int j = 0; j < n; ++j) x(j) = colval[j] - colval[n + j];

  out.status = LpStatus::Optimal;
  out.point = x;
  out.value = c.dot(x);
  return out;
}

}  // namespace presyn::geom
