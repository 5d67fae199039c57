#include "presyn/geometry/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "presyn/errors.hpp"

namespace presyn::geom {

namespace {
constexpr double kZeroRow = 1e-12;   // below this a coefficient row is "zero"
constexpr double kCoefZero = 1e-10;  // FM treats smaller pivots as zero
constexpr std::size_t kMaxFmRows = 100000;
}  // namespace

Polytope::Polytope(Eigen::MatrixXd A, Eigen::VectorXd b)
    : A_(std::move(A)), b_(std::move(b)) {
  if (A_.cols() < 1) throw DimensionError("polytope must have dimension >= 1");
  if (A_.rows() != b_.size())
    throw DimensionError("polytope: A rows vs b length mismatch");
  if (!A_.allFinite() || !b_.allFinite())
    throw Error("polytope: non-finite entries");
}

Polytope Polytope::universe(int dim) {
  if (dim < 1) throw DimensionError("universe: dimension must be >= 1");
  return Polytope(Eigen::MatrixXd::Zero(0, dim), Eigen::VectorXd::Zero(0));
}

Polytope Polytope::empty(int dim) {
  if (dim < 1) throw DimensionError("empty: dimension must be >= 1");
  Eigen::VectorXd b(1);
  b(0) = -1.0;
  return Polytope(Eigen::MatrixXd::Zero(1, dim), b);
}

Polytope Polytope::box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  if (lo.size() != hi.size()) throw DimensionError("box: lo vs hi length");
  const int n = static_cast<int>(lo.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n, n);
  Eigen::VectorXd b(2 * n);
  for (int i = 0; i < n; ++i) {
    A(2 * i, i) = 1.0;
    b(2 * i) = hi(i);
    A(2 * i + 1, i) = -1.0;
    b(2 * i + 1) = -lo(i);
  }
  return Polytope(std::move(A), std::move(b));
}

Polytope Polytope::interval(double lo, double hi) {
  Eigen::VectorXd l(1), h(1);
  l(0) = lo;
  h(0) = hi;
  return box(l, h);
}

bool Polytope::is_canonical_empty() const {
  return rows() == 1 && A_.row(0).lpNorm<Eigen::Infinity>() < kZeroRow &&
         std::abs(b_(0) + 1.0) < kZeroRow;
}

Polytope Polytope::normalized() const {
  if (is_canonical_empty()) return *this;
  std::vector<int> keep;
  keep.reserve(rows());
  for (int i = 0; i < rows(); ++i) {
    const double norm = A_.row(i).norm();
    if (norm < kZeroRow) {
      if (b_(i) < -1e-9) return empty(dim());  // 0.x <= negative: no point
      continue;                                // trivially true row
    }
    keep.push_back(i);
  }
  Eigen::MatrixXd A(keep.size(), dim());
  Eigen::VectorXd b(keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const double norm = A_.row(keep[k]).norm();
    A.row(k) = A_.row(keep[k]) / norm;
    b(k) = b_(keep[k]) / norm;
  }
  return Polytope(std::move(A), std::move(b));
}

bool Polytope::contains(const Eigen::VectorXd& x, double eps) const {
  return margin(x) >= -eps;
}

double Polytope::margin(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw DimensionError("margin: point dimension");
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < rows(); ++i) {
    const double norm = A_.row(i).norm();
    if (norm < kZeroRow) {
      m = std::min(m, b_(i) >= 0 ? m : b_(i));
      continue;
    }
    m = std::min(m, (b_(i) - A_.row(i).dot(x)) / norm);
  }
  return m;
}

bool is_empty(const Polytope& p, const Tol& tol) {
  if (p.is_canonical_empty()) return true;
  const Polytope q = p.normalized();
  if (q.is_canonical_empty()) return true;
  if (q.rows() == 0) return false;
  LpOptions opts;
  opts.feas_tol = tol.eps;
  const LpOutcome lp =
      solve_lp(q.A(), q.b(), Eigen::VectorXd::Zero(q.dim()), opts);
  return lp.status == LpStatus::Infeasible;
}

std::pair<bool, Eigen::VectorXd> feasible_point(const Polytope& p,
                                                const Tol& tol) {
  if (p.is_canonical_empty()) return {false, Eigen::VectorXd()};
  const Polytope q = p.normalized();
  if (q.is_canonical_empty()) return {false, Eigen::VectorXd()};
  if (q.rows() == 0) return {true, Eigen::VectorXd::Zero(q.dim())};
  LpOptions opts;
  opts.feas_tol = tol.eps;
  const LpOutcome lp =
      solve_lp(q.A(), q.b(), Eigen::VectorXd::Zero(q.dim()), opts);
  if (lp.status != LpStatus::Optimal) return {false, Eigen::VectorXd()};
  return {true, lp.point};
}

LpOutcome support(const Polytope& p, const Eigen::VectorXd& c,
                  const Tol& tol) {
  if (c.size() != p.dim()) throw DimensionError("support: direction dimension");
  if (is_empty(p, tol)) throw Error("support: polytope is empty");
  const Polytope q = p.normalized();
  LpOptions opts;
  opts.feas_tol = tol.eps;
  return solve_lp(q.A(), q.b(), c, opts);
}

Polytope intersect(const Polytope& p, const Polytope& q, const Tol& tol) {
  if (p.dim() != q.dim()) throw DimensionError("intersect: dimension mismatch");
  if (p.is_canonical_empty() || q.is_canonical_empty())
    return Polytope::empty(p.dim());
  Eigen::MatrixXd A(p.rows() + q.rows(), p.dim());
  Eigen::VectorXd b(p.rows() + q.rows());
  A << p.A(), q.A();
  b << p.b(), q.b();
  return remove_redundancy(Polytope(std::move(A), std::move(b)), tol);
}

bool is_subset(const Polytope& p, const Polytope& q, double eps) {
  if (p.dim() != q.dim()) throw DimensionError("is_subset: dimension mismatch");
  Tol tol{eps};
  if (is_empty(p, tol)) return true;
  const Polytope qn = q.normalized();
  if (qn.is_canonical_empty()) return false;  // p nonempty, q empty
  const Polytope pn = p.normalized();
  for (int i = 0; i < qn.rows(); ++i) {
    const LpOutcome lp = solve_lp(pn.A(), pn.b(), qn.A().row(i).transpose());
    if (lp.status == LpStatus::Unbounded) return false;
    if (lp.status != LpStatus::Optimal)
      throw SolverError("is_subset: nonempty polytope reported infeasible");
    if (lp.value > qn.b()(i) + eps) return false;
  }
  return true;
}

bool set_equal(const Polytope& p, const Polytope& q, double eps) {
  return is_subset(p, q, eps) && is_subset(q, p, eps);
}

Polytope remove_redundancy(const Polytope& p, const Tol& tol) {
  Polytope q = p.normalized();
  if (q.is_canonical_empty()) return Polytope::empty(p.dim());
  const int n = q.dim();
  if (q.rows() == 0) return q;

  // Cheap pass: drop exact duplicates and dominated parallel rows.
  std::vector<int> keep;
  for (int i = 0; i < q.rows(); ++i) {
    bool dominated = false;
    for (int j : keep) {
      if ((q.A().row(i) - q.A().row(j)).lpNorm<Eigen::Infinity>() < 1e-9 &&
          q.b()(i) >= q.b()(j) - 1e-12) {
        dominated = true;
        break;
      }
    }
    if (!dominated) keep.push_back(i);
  }
  // A kept row may dominate an earlier one; rescan once in reverse.
  std::vector<int> keep2;
  for (auto it = keep.rbegin(); it != keep.rend(); ++it) {
    bool dominated = false;
    for (int j : keep2) {
      if ((q.A().row(*it) - q.A().row(j)).lpNorm<Eigen::Infinity>() < 1e-9 &&
          q.b()(*it) >= q.b()(j) - 1e-12) {
        dominated = true;
        break;
      }
    }
    if (!dominated) keep2.push_back(*it);
  }
  std::sort(keep2.begin(), keep2.end());
  Eigen::MatrixXd A(keep2.size(), n);
  Eigen::VectorXd b(keep2.size());
  for (std::size_t k = 0; k < keep2.size(); ++k) {
    A.row(k) = q.A().row(keep2[k]);
    b(k) = q.b()(keep2[k]);
  }

  if (is_empty(Polytope(A, b), tol)) return Polytope::empty(n);

  const int m = static_cast<int>(A.rows());
  std::vector<bool> active(m, true);
  int nactive = m;
  for (int i = 0; i < m; ++i) {
    if (nactive <= 1) break;
    // Test row i against the others, capped at b_i + 1 to keep the LP bounded.
    Eigen::MatrixXd Ao(nactive, n);
    Eigen::VectorXd bo(nactive);
    int k = 0;
    for (int j = 0; j < m; ++j) {
      if (j == i || !active[j]) continue;
      Ao.row(k) = A.row(j);
      bo(k) = b(j);
      ++k;
    }
    Ao.row(k) = A.row(i);
    bo(k) = b(i) + 1.0;
    const LpOutcome lp = solve_lp(Ao, bo, A.row(i).transpose());
    if (lp.status != LpStatus::Optimal)
      throw SolverError("remove_redundancy: unexpected LP status");
    if (lp.value <= b(i) + tol.eps) {
      active[i] = false;
      --nactive;
    }
  }

  Eigen::MatrixXd Ar(nactive, n);
  Eigen::VectorXd br(nactive);
  int k = 0;
  for (int i = 0; i < m; ++i) {
    if (!active[i]) continue;
    Ar.row(k) = A.row(i);
    br(k) = b(i);
    ++k;
  }
  return Polytope(std::move(Ar), std::move(br));
}

Polytope project(const Polytope& p, const std::vector<int>& keep,
                 const Tol& tol) {
  const int n = p.dim();
  if (keep.empty()) throw DimensionError("project: keep set must be nonempty");
  std::vector<bool> seen(n, false);
  for (int k : keep) {
    if (k < 0 || k >= n) throw DimensionError("project: keep index range");
    if (seen[k]) throw DimensionError("project: duplicate keep index");
    seen[k] = true;
  }
  const int nk = static_cast<int>(keep.size());

  Polytope cur = remove_redundancy(p, tol);
  if (cur.is_canonical_empty()) return Polytope::empty(nk);

  // live[j] = original variable index of current column j
  std::vector<int> live(n);
  std::iota(live.begin(), live.end(), 0);

  while (static_cast<int>(live.size()) > nk) {
    // Greedy choice: eliminate the variable with the fewest pos x neg pairs.
    int best_col = -1;
    long best_cost = std::numeric_limits<long>::max();
    for (std::size_t j = 0; j < live.size(); ++j) {
      if (seen[live[j]]) continue;
      long pos = 0, neg = 0;
      for (int i = 0; i < cur.rows(); ++i) {
        const double a = cur.A()(i, j);
        if (a > kCoefZero)
          ++pos;
        else if (a < -kCoefZero)
          ++neg;
      }
      const long cost = pos * neg;
      if (cost < best_cost) {
        best_cost = cost;
        best_col = static_cast<int>(j);
      }
    }

    std::vector<int> pos, neg, zero;
    for (int i = 0; i < cur.rows(); ++i) {
      const double a = cur.A()(i, best_col);
      if (a > kCoefZero)
        pos.push_back(i);
      else if (a < -kCoefZero)
        neg.push_back(i);
      else
        zero.push_back(i);
    }
    const std::size_t nrows = zero.size() + pos.size() * neg.size();
    if (nrows > kMaxFmRows) throw SolverError("project: row blowup");

    const int ncols = static_cast<int>(live.size()) - 1;
    Eigen::MatrixXd A(nrows, ncols);
    Eigen::VectorXd b(nrows);
    auto copy_without = [&](int row, const Eigen::RowVectorXd& src, double rhs) {
      int c = 0;
      for (int j = 0; j < static_cast<int>(live.size()); ++j) {
        if (j == best_col) continue;
        A(row, c++) = src(j);
      }
      b(row) = rhs;
    };
    std::size_t r = 0;
    for (int i : zero) copy_without(r++, cur.A().row(i), cur.b()(i));
    for (int ip : pos) {
      const double alpha = cur.A()(ip, best_col);
      for (int iq : neg) {
        const double beta = cur.A()(iq, best_col);  // beta < 0
        const Eigen::RowVectorXd row =
            (-beta) * cur.A().row(ip) + alpha * cur.A().row(iq);
        const double rhs = (-beta) * cur.b()(ip) + alpha * cur.b()(iq);
        copy_without(r++, row, rhs);
      }
    }
    live.erase(live.begin() + best_col);

    cur = remove_redundancy(Polytope(std::move(A), std::move(b)), tol);
    if (cur.is_canonical_empty()) return Polytope::empty(nk);
  }

  // Permute remaining columns into the order requested by `keep`.
  Eigen::MatrixXd A(cur.rows(), nk);
  for (int t = 0; t < nk; ++t) {
    const auto it = std::find(live.begin(), live.end(), keep[t]);
    A.col(t) = cur.A().col(it - live.begin());
  }
  return Polytope(std::move(A), cur.b());
}

std::pair<Eigen::VectorXd, double> chebyshev_center(const Polytope& p,
                                                    const Tol& tol) {
  const Polytope q = p.normalized();
  if (q.is_canonical_empty()) throw Error("chebyshev_center: empty polytope");
  const int n = q.dim();
  const int m = q.rows();
  // Variables (x, r): maximize r s.t. a_i.x + r <= b_i (rows are unit norm),
  // 0 <= r <= 1e9 (upper guard keeps the LP bounded on unbounded inputs).
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m + 2, n + 1);
  Eigen::VectorXd b(m + 2);
  A.block(0, 0, m, n) = q.A();
  A.col(n).segment(0, m).setOnes();
  b.segment(0, m) = q.b();
  A(m, n) = -1.0;
  b(m) = 0.0;
  A(m + 1, n) = 1.0;
  b(m + 1) = 1e9;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n + 1);
  c(n) = 1.0;
  LpOptions opts;
  opts.feas_tol = tol.eps;
  const LpOutcome lp = solve_lp(A, b, c, opts);
  if (lp.status != LpStatus::Optimal)
    throw Error("chebyshev_center: empty polytope");
  return {lp.point.segment(0, n), lp.point(n)};
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> bounding_box(const Polytope& p,
                                                         const Tol& tol) {
  if (is_empty(p, tol)) throw Error("bounding_box: empty polytope");
  const int n = p.dim();
  Eigen::VectorXd lo(n), hi(n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    c(j) = 1.0;
    LpOutcome up = support(p, c, tol);
    c(j) = -1.0;
    LpOutcome dn = support(p, c, tol);
    if (up.status != LpStatus::Optimal || dn.status != LpStatus::Optimal)
      throw Error("bounding_box: unbounded polytope");
    hi(j) = up.value;
    lo(j) = -dn.value;
  }
  return {lo, hi};
}

}  // namespace presyn::geom
