#pragma once

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include "presyn/geometry/polytope.hpp"
#include "presyn/systems/state_set.hpp"

namespace presyn::sys {

/// One mode of a finite transition system. transitions[x][u] is the
/// nonempty successor list; set-valuedness models adversarial choice.
struct FiniteMode {
  std::vector<std::vector<std::vector<int>>> transitions;
};

/// One mode with affine dynamics x+ = A x + B u + E d + K, d in D.
struct AffineMode {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd E;
  Eigen::VectorXd K;
  geom::Polytope D;
};

struct FinitePlant {
  int num_states = 0;
  int num_inputs = 0;
  std::vector<FiniteMode> modes;
};

struct AffinePlant {
  geom::Polytope X;
  geom::Polytope U;
  std::vector<AffineMode> modes;
};

/// Mode-indexed dynamics with a homogeneous backend. Validates structural
/// invariants on construction (dimension consistency, no dead inputs,
/// nonempty disturbance sets) and is immutable afterwards.
class SwitchedSystem {
 public:
  explicit SwitchedSystem(FinitePlant plant);
  explicit SwitchedSystem(AffinePlant plant);

  bool finite() const { return std::holds_alternative<FinitePlant>(plant_); }
  int num_modes() const;
  const FinitePlant& fin() const { return std::get<FinitePlant>(plant_); }
  const AffinePlant& aff() const { return std::get<AffinePlant>(plant_); }

  /// Whole state domain: every id, or X.
  StateSet full_domain() const;
  /// Backend tag check against a candidate set; throws DimensionError on
  /// mismatch (finite set against affine system or vice versa).
  void check_backend(const StateSet& s) const;

 private:
  std::variant<FinitePlant, AffinePlant> plant_;
};

struct FixpointOptions {
  double eps = 1e-7;
  int max_iters = 500;
};

enum class FixpointStatus { Converged, IterationCapped };

struct InvResult {
  StateSet set;
  FixpointStatus status = FixpointStatus::Converged;
  int iterations = 0;
};

/// Halfspaces over the stacked vector (x, u) under which every disturbed
/// successor of mode lands in the target: each target row (a, beta) tightens
/// to a^T A x + a^T B u <= beta - a.K - sup_{d in D} a.E d. A target row that
/// cannot be met for any disturbance (unbounded support) collapses the result
/// to a single infeasible row.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> robust_step_rows(
    const AffinePlant& plant, int mode, const geom::Polytope& target,
    const geom::Tol& tol = {});

/// One-step controlled predecessor {x in X : exists u in U, f_mode(x,u) in V}.
/// Affine backend robustifies each target row against the disturbance via its
/// support function, stacks domain constraints over (x,u), and projects onto
/// x; the result is always within X.
StateSet pre(const SwitchedSystem& sys, int mode, const StateSet& V,
             const geom::Tol& tol = {});

/// pre(mode, V) intersected with S.
StateSet pre_int(const SwitchedSystem& sys, int mode, const StateSet& V,
                 const StateSet& S, const geom::Tol& tol = {});

/// Maximal controlled invariant subset of S under f_mode: the fixed point of
/// V <- pre_int(mode, V, S) from V = S. The iterate sequence is non-increasing
/// (checked every step, InvariantError on violation). Hitting the iteration
/// cap is reported through status, not an error; a capped set is a valid
/// over-approximation but is not certified invariant.
InvResult inv(const SwitchedSystem& sys, int mode, const StateSet& S,
              const FixpointOptions& opts = {});

}  // namespace presyn::sys
