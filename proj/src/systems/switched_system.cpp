#include "presyn/systems/switched_system.hpp"

#include <numeric>
#include <string>

#include "presyn/errors.hpp"

namespace presyn::sys {

namespace {

void validate(const FinitePlant& p) {
  if (p.num_states < 1 || p.num_inputs < 1)
    throw SpecError("finite plant needs at least one state and one input");
  if (p.modes.empty()) throw SpecError("plant has no modes");
  for (std::size_t m = 0; m < p.modes.size(); ++m) {
    const auto& tr = p.modes[m].transitions;
    if (static_cast<int>(tr.size()) != p.num_states)
      throw SpecError("mode " + std::to_string(m + 1) +
                      ": transition table rows != num_states");
    for (int x = 0; x < p.num_states; ++x) {
      if (static_cast<int>(tr[x].size()) != p.num_inputs)
        throw SpecError("mode " + std::to_string(m + 1) +
                        ": transition table cols != num_inputs");
      for (int u = 0; u < p.num_inputs; ++u) {
        if (tr[x][u].empty())
          throw SpecError("mode " + std::to_string(m + 1) + ": state " +
                          std::to_string(x + 1) + ", input " +
                          std::to_string(u + 1) + " has no successor");
        for (int nx : tr[x][u])
          if (nx < 0 || nx >= p.num_states)
            throw SpecError("mode " + std::to_string(m + 1) +
                            ": successor id out of range");
      }
    }
  }
}

void validate(const AffinePlant& p) {
  if (p.modes.empty()) throw SpecError("plant has no modes");
  const int n = p.X.dim();
  const int m = p.U.dim();
  if (n < 1 || m < 1)
    throw SpecError("state and input domains must have positive dimension");
  for (std::size_t i = 0; i < p.modes.size(); ++i) {
    const auto& md = p.modes[i];
    const std::string tag = "mode " + std::to_string(i + 1) + ": ";
    if (md.A.rows() != n || md.A.cols() != n)
      throw DimensionError(tag + "A must be n x n");
    if (md.B.rows() != n || md.B.cols() != m)
      throw DimensionError(tag + "B must be n x m");
    if (md.K.size() != n) throw DimensionError(tag + "K must have length n");
    if (md.E.rows() != n || md.E.cols() != md.D.dim())
      throw DimensionError(tag + "E must be n x dim(D)");
    if (geom::is_empty(md.D)) throw SpecError(tag + "disturbance set is empty");
  }
}

FiniteSet finite_pre(const FinitePlant& p, int mode, const FiniteSet& V) {
  const auto& tr = p.modes[mode].transitions;
  FiniteSet out(p.num_states);
  for (int x = 0; x < p.num_states; ++x) {
    for (int u = 0; u < p.num_inputs; ++u) {
      bool all_in = true;
      for (int nx : tr[x][u])
        if (!V.contains(nx)) {
          all_in = false;
          break;
        }
      if (all_in) {
        out.insert(x);
        break;
      }
    }
  }
  return out;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> infeasible_rows(int cols) {
  return {Eigen::MatrixXd::Zero(1, cols), -Eigen::VectorXd::Ones(1)};
}

bool rows_infeasible(const std::pair<Eigen::MatrixXd, Eigen::VectorXd>& rows) {
  return rows.second.size() == 1 && rows.second(0) < 0.0 &&
         rows.first.row(0).isZero();
}

geom::Polytope affine_pre(const AffinePlant& p, int mode,
                          const geom::Polytope& V, const geom::Tol& tol) {
  const int n = p.X.dim();
  const int m = p.U.dim();
  auto rows = robust_step_rows(p, mode, V, tol);
  if (rows_infeasible(rows)) return geom::Polytope::empty(n);

  const int rv = static_cast<int>(rows.second.size());
  const int rx = p.X.rows();
  const int ru = p.U.rows();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rv + rx + ru, n + m);
  Eigen::VectorXd b(rv + rx + ru);
  A.topRows(rv) = rows.first;
  b.head(rv) = rows.second;
  A.block(rv, 0, rx, n) = p.X.A();
  b.segment(rv, rx) = p.X.b();
  A.block(rv + rx, n, ru, m) = p.U.A();
  b.segment(rv + rx, ru) = p.U.b();

  std::vector<int> keep(n);
  std::iota(keep.begin(), keep.end(), 0);
  return geom::project(geom::Polytope(std::move(A), std::move(b)), keep, tol);
}

}  // namespace

std::pair<Eigen::MatrixXd, Eigen::VectorXd> robust_step_rows(
    const AffinePlant& p, int mode, const geom::Polytope& target,
    const geom::Tol& tol) {
  if (mode < 0 || mode >= static_cast<int>(p.modes.size()))
    throw Error("mode index out of range");
  const int n = p.X.dim();
  const int m = p.U.dim();
  const auto& md = p.modes[mode];
  const geom::Polytope Vn = target.normalized();
  if (Vn.is_canonical_empty()) return infeasible_rows(n + m);

  const int rv = Vn.rows();
  Eigen::MatrixXd A(rv, n + m);
  Eigen::VectorXd b(rv);
  for (int r = 0; r < rv; ++r) {
    const Eigen::VectorXd a = Vn.A().row(r).transpose();
    const auto sup = geom::support(md.D, md.E.transpose() * a, tol);
    if (sup.status == geom::LpStatus::Unbounded) return infeasible_rows(n + m);
    if (sup.status != geom::LpStatus::Optimal)
      throw InvariantError("support over a validated disturbance set failed");
    A.block(r, 0, 1, n) = a.transpose() * md.A;
    A.block(r, n, 1, m) = a.transpose() * md.B;
    b(r) = Vn.b()(r) - a.dot(md.K) - sup.value;
  }
  return {std::move(A), std::move(b)};
}

SwitchedSystem::SwitchedSystem(FinitePlant plant) : plant_(std::move(plant)) {
  validate(fin());
}

SwitchedSystem::SwitchedSystem(AffinePlant plant) : plant_(std::move(plant)) {
  validate(aff());
}

int SwitchedSystem::num_modes() const {
  return finite() ? static_cast<int>(fin().modes.size())
                  : static_cast<int>(aff().modes.size());
}

StateSet SwitchedSystem::full_domain() const {
  if (finite()) return FiniteSet::full(fin().num_states);
  return aff().X;
}

void SwitchedSystem::check_backend(const StateSet& s) const {
  if (finite() != ss_is_finite(s))
    throw DimensionError("state set backend does not match the system");
  if (finite()) {
    if (ss_fin(s).universe() != fin().num_states)
      throw DimensionError("finite set universe does not match the system");
  } else if (ss_pol(s).dim() != aff().X.dim()) {
    throw DimensionError("polytope dimension does not match the state space");
  }
}

StateSet pre(const SwitchedSystem& sys, int mode, const StateSet& V,
             const geom::Tol& tol) {
  if (mode < 0 || mode >= sys.num_modes())
    throw Error("mode index out of range");
  sys.check_backend(V);
  if (sys.finite()) return finite_pre(sys.fin(), mode, ss_fin(V));
  return affine_pre(sys.aff(), mode, ss_pol(V), tol);
}

StateSet pre_int(const SwitchedSystem& sys, int mode, const StateSet& V,
                 const StateSet& S, const geom::Tol& tol) {
  sys.check_backend(S);
  return ss_intersect(pre(sys, mode, V, tol), S, tol);
}

InvResult inv(const SwitchedSystem& sys, int mode, const StateSet& S,
              const FixpointOptions& opts) {
  sys.check_backend(S);
  const geom::Tol tol{opts.eps};
  StateSet cur = S;
  for (int k = 1; k <= opts.max_iters; ++k) {
    StateSet next = pre_int(sys, mode, cur, S, tol);
    if (!ss_is_subset(next, cur, opts.eps))
      throw InvariantError("invariance iterates must be non-increasing");
    if (ss_is_subset(cur, next, opts.eps))
      return {std::move(next), FixpointStatus::Converged, k};
    cur = std::move(next);
  }
  return {std::move(cur), FixpointStatus::IterationCapped, opts.max_iters};
}

}  // namespace presyn::sys
