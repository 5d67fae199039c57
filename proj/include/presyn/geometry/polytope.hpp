#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "presyn/geometry/linprog.hpp"

namespace presyn::geom {

/// One tolerance knob drives the kernel: LP feasibility slack, redundancy
/// margin, and membership slack all use `eps` (they are tied by default).
struct Tol {
  double eps = 1e-7;
};

/// Convex polytope in halfspace representation {x : A x <= b}.
///
/// The empty set has a canonical encoding: a single all-zero row with b = -1.
/// A 0-row matrix encodes the whole space. Rows are stored as given; use
/// normalized() for unit-norm rows (the canonical-empty row stays as is).
class Polytope {
 public:
  /// Placeholder with dimension 0; any consumer validates real dimensions.
  Polytope() : A_(0, 0), b_(0) {}
  Polytope(Eigen::MatrixXd A, Eigen::VectorXd b);

  static Polytope universe(int dim);
  static Polytope empty(int dim);
  static Polytope box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);
  static Polytope interval(double lo, double hi);

  int dim() const { return static_cast<int>(A_.cols()); }
  int rows() const { return static_cast<int>(A_.rows()); }
  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::VectorXd& b() const { return b_; }

  /// True iff this is exactly the canonical empty encoding (does not solve
  /// an LP; see is_empty for the semantic test).
  bool is_canonical_empty() const;

  /// Copy with every row scaled to unit norm. Zero rows with b >= 0 are
  /// dropped (trivially true); a zero row with b < 0 collapses the whole
  /// polytope to the canonical empty encoding.
  Polytope normalized() const;

  bool contains(const Eigen::VectorXd& x, double eps) const;

  /// Signed slack min_i (b_i - a_i.x) over normalized rows; +inf for the
  /// universe. Positive inside, negative outside.
  double margin(const Eigen::VectorXd& x) const;

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
};

/// Emptiness via one feasibility LP.
bool is_empty(const Polytope& p, const Tol& tol = {});

/// A feasible point, if one exists.
std::pair<bool, Eigen::VectorXd> feasible_point(const Polytope& p,
                                                const Tol& tol = {});

/// Support function max{c.x : x in P}. Unbounded directions are reported via
/// the outcome status. Throws Error if P is empty (callers check first).
LpOutcome support(const Polytope& p, const Eigen::VectorXd& c,
                  const Tol& tol = {});

/// Row stacking followed by redundancy removal.
Polytope intersect(const Polytope& p, const Polytope& q, const Tol& tol = {});

/// P subseteq Q up to eps: every row of Q is violated by at most eps over P.
/// The empty set is a subset of everything.
bool is_subset(const Polytope& p, const Polytope& q, double eps);

/// Same-set test at eps (mutual inclusion).
bool set_equal(const Polytope& p, const Polytope& q, double eps);

/// Irredundant equivalent representation. An empty input (canonical or
/// detected infeasible) comes back as the canonical empty polytope.
Polytope remove_redundancy(const Polytope& p, const Tol& tol = {});

/// Exact orthogonal projection onto the coordinates in `keep` (result
/// dimensions follow the order of `keep`). Fourier-Motzkin elimination with
/// redundancy removal interleaved after each eliminated variable.
Polytope project(const Polytope& p, const std::vector<int>& keep,
                 const Tol& tol = {});

/// Chebyshev center: deepest point and its ball radius. Radius 0 means the
/// polytope is lower-dimensional (but nonempty); throws Error on empty input.
std::pair<Eigen::VectorXd, double> chebyshev_center(const Polytope& p,
                                                    const Tol& tol = {});

/// Componentwise bounding box [lo, hi]. Throws Error on empty or unbounded
/// input.
std::pair<Eigen::VectorXd, Eigen::VectorXd> bounding_box(const Polytope& p,
                                                         const Tol& tol = {});

}  // namespace presyn::geom
