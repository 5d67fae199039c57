#include "presyn/control/controller.hpp"

#include <algorithm>
#include <utility>

#include "presyn/errors.hpp"

namespace presyn::control {

namespace {

std::string node_label(int id) { return "node " + std::to_string(id + 1); }

bool same_reduction(const preview::PreviewAutomaton& a,
                    const preview::PreviewAutomaton& b) {
  if (a.num_nodes != b.num_nodes || a.holding != b.holding ||
      a.edges.size() != b.edges.size())
    return false;
  for (std::size_t i = 0; i < a.edges.size(); ++i) {
    const auto& x = a.edges[i];
    const auto& y = b.edges[i];
    if (x.from != y.from || x.to != y.to || x.preview.lo != y.preview.lo ||
        x.preview.hi != y.preview.hi)
      return false;
  }
  return true;
}

bool state_in(const sys::SwitchedSystem& plant, const sys::StateSet& set,
              const PlantState& x, double eps) {
  if (plant.finite()) {
    if (!std::holds_alternative<int>(x))
      throw DimensionError("expected a finite state id");
    return sys::ss_fin(set).contains(std::get<int>(x));
  }
  if (!std::holds_alternative<Eigen::VectorXd>(x))
    throw DimensionError("expected a state vector");
  return sys::ss_pol(set).contains(std::get<Eigen::VectorXd>(x), eps);
}

}  // namespace

Controller::Controller(sys::SwitchedSystem system, preview::PreviewAutomaton raw,
                       synth::SynthesisCertificate cert, double eps)
    : system_(std::move(system)),
      raw_(std::move(raw)),
      cert_(std::move(cert)),
      eps_(eps) {
  const auto violations = preview::validate_automaton(raw_);
  if (!violations.empty())
    throw SpecError("preview automaton: " + violations.front().detail);
  if (system_.num_modes() != raw_.num_nodes)
    throw DimensionError("plant modes and automaton nodes disagree");
  if (cert_.winning.status != sys::FixpointStatus::Converged)
    throw SpecError("certificate did not converge; refusing to control");
  if (static_cast<int>(cert_.winning.w.size()) != raw_.num_nodes ||
      static_cast<int>(cert_.nodes.size()) != raw_.num_nodes)
    throw DimensionError("certificate size does not match the automaton");
  if (!same_reduction(cert_.reduced, preview::reduce_to_lower_bounds(raw_)))
    throw SpecError("certificate was synthesized for a different automaton");
  for (const auto& w : cert_.winning.w) system_.check_backend(w);
}

ControllerState Controller::initial(int q0, const PlantState& x,
                                    bool allow_unsafe) const {
  if (q0 < 0 || q0 >= raw_.num_nodes) throw Error("node index out of range");
  if (!allow_unsafe && !state_in(system_, cert_.winning.w[q0], x, eps_))
    throw InfeasibleStateError("start state is outside the winning set of " +
                               node_label(q0));
  return {q0, 0, std::nullopt, std::nullopt};
}

ControllerState Controller::receive_preview(
    const ControllerState& cs, const preview::PreviewInput& p) const {
  if (cs.pending)
    throw SpecError("announcement overlaps the pending switch to " +
                    node_label(cs.pending->dest));
  const preview::Edge* e = raw_.find_edge(cs.mode, p.dest);
  if (!e)
    throw SpecError("no edge from " + node_label(cs.mode) + " to " +
                    node_label(p.dest));
  if (!e->preview.contains(p.tau))
    throw SpecError("preview lead " + std::to_string(p.tau) +
                    " is outside the window of the edge to " +
                    node_label(p.dest));
  const auto& hold = raw_.holding[cs.mode];
  if (hold && cs.steps_in_mode + p.tau < *hold)
    throw SpecError("announced switch would break the holding time of " +
                    node_label(cs.mode));
  const preview::PreviewInput reduced =
      preview::infer_reduced_input(raw_, cs.mode, p);
  ControllerState next = cs;
  next.pending = PendingSwitch{p.dest, p.tau, reduced.tau};
  next.raw_pending = p;
  return next;
}

StepResult Controller::step(const ControllerState& cs,
                            const PlantState& x) const {
  if (cs.mode < 0 || cs.mode >= raw_.num_nodes) throw Error("unknown mode");
  if (cs.pending && cs.pending->countdown == 0)
    throw Error("switch is due; apply on_switch before stepping");

  const synth::NodeCertificate& nc = node_cert(cs.mode);
  const sys::StateSet* target = nullptr;
  std::string label;
  const bool active = cs.pending && cs.pending->countdown <= cs.pending->activation;
  if (active) {
    // Reachability phase: walk C_l down so C_0 = W_dest lands at the switch.
    const int l = cs.pending->countdown;
    const auto& chain = nc.reach.at(cs.pending->dest);
    target = &chain[static_cast<std::size_t>(l - 1)];
    label = "reach[" + std::to_string(cs.pending->dest + 1) + "][" +
            std::to_string(l - 1) + "]";
  } else if (cert_.reduced.is_sink(cs.mode)) {
    target = &nc.hold_chain.at(0);
    label = "hold[0]";
  } else {
    // Holding phase walks the chain down and parks on the invariant core.
    const int k = std::max(nc.t_min, *nc.hold - cs.steps_in_mode - 1);
    target = &nc.hold_chain.at(k);
    label = "hold[" + std::to_string(k) + "]";
  }

  PlantInput u = choose_input(cs.mode, x, *target);
  ControllerState next = cs;
  next.steps_in_mode += 1;
  if (next.pending) next.pending->countdown -= 1;
  return {std::move(u), std::move(label), std::move(next)};
}

ControllerState Controller::on_switch(const ControllerState& cs,
                                      int new_mode) const {
  if (new_mode < 0 || new_mode >= raw_.num_nodes) throw Error("unknown mode");
  if (!cs.pending)
    throw SpecError("unannounced switch to " + node_label(new_mode));
  if (cs.pending->dest != new_mode)
    throw SpecError("switch went to " + node_label(new_mode) +
                    " but the announcement named " +
                    node_label(cs.pending->dest));
  if (cs.pending->countdown != 0)
    throw SpecError("switch to " + node_label(new_mode) + " landed " +
                    std::to_string(cs.pending->countdown) +
                    " steps before its announced time");
  return {new_mode, 0, std::nullopt, std::nullopt};
}

const synth::NodeCertificate& Controller::node_cert(int mode) const {
  if (mode < 0 || mode >= static_cast<int>(cert_.nodes.size()))
    throw Error("unknown mode");
  return cert_.nodes[mode];
}

PlantInput Controller::choose_input(int mode, const PlantState& x,
                                    const sys::StateSet& target) const {
  if (system_.finite()) {
    if (!std::holds_alternative<int>(x))
      throw DimensionError("expected a finite state id");
    const int xs = std::get<int>(x);
    const auto& p = system_.fin();
    if (xs < 0 || xs >= p.num_states) throw Error("state id out of range");
    const auto& tf = sys::ss_fin(target);
    for (int u = 0; u < p.num_inputs; ++u) {
      bool ok = true;
      for (int nx : p.modes[mode].transitions[xs][u])
        if (!tf.contains(nx)) {
          ok = false;
          break;
        }
      if (ok) return u;
    }
    throw InfeasibleStateError("no input keeps state " + std::to_string(xs + 1) +
                               " inside the target set");
  }

  if (!std::holds_alternative<Eigen::VectorXd>(x))
    throw DimensionError("expected a state vector");
  const Eigen::VectorXd& xv = std::get<Eigen::VectorXd>(x);
  const auto& p = system_.aff();
  const int n = p.X.dim();
  const int m = p.U.dim();
  if (xv.size() != n)
    throw DimensionError("state vector has the wrong dimension");
  const geom::Tol tol{eps_};
  auto rows = sys::robust_step_rows(p, mode, sys::ss_pol(target), tol);
  const bool no_robust_row = rows.second.size() == 1 && rows.second(0) < 0.0 &&
                             rows.first.row(0).isZero();
  if (no_robust_row)
    throw InfeasibleStateError("target admits no disturbance-robust input");

  const int rv = static_cast<int>(rows.second.size());
  const int ru = p.U.rows();
  Eigen::MatrixXd Au(rv + ru, m);
  Eigen::VectorXd bu(rv + ru);
  Au.topRows(rv) = rows.first.rightCols(m);
  bu.head(rv) = rows.second - rows.first.leftCols(n) * xv;
  Au.bottomRows(ru) = p.U.A();
  bu.tail(ru) = p.U.b();

  geom::Polytope feas(Au, bu);
  if (geom::is_empty(feas, tol)) {
    // States delivered by the eps-tolerant fixed point may sit marginally
    // outside the exact one-step set; one eps of slack recovers those before
    // declaring the state infeasible.
    bu.head(rv).array() += eps_;
    feas = geom::Polytope(std::move(Au), std::move(bu));
    if (geom::is_empty(feas, tol))
      throw InfeasibleStateError("no feasible input for the current state");
  }
  return geom::chebyshev_center(feas, tol).first;
}

}  // namespace presyn::control
