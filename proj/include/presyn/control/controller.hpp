#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <variant>

#include "presyn/preview/automaton.hpp"
#include "presyn/synthesis/winning.hpp"
#include "presyn/systems/switched_system.hpp"

namespace presyn::control {

/// Plant state: a state id on the finite backend, a vector on the affine one.
using PlantState = std::variant<int, Eigen::VectorXd>;

/// Control input: an input id on the finite backend, a vector otherwise.
using PlantInput = std::variant<int, Eigen::VectorXd>;

/// An announced switch that has not landed yet. countdown is the number of
/// steps until the switch; the reachability chain engages once countdown
/// drops to activation (the reduced announcement lead of the edge). Until
/// then the announcement is buffered and holding control continues.
struct PendingSwitch {
  int dest = 0;
  int countdown = 0;
  int activation = 0;
};

/// Bookkeeping carried between steps. Values only; step never mutates its
/// argument. pending present implies the edge (mode, pending.dest) exists.
struct ControllerState {
  int mode = 0;
  int steps_in_mode = 0;
  std::optional<PendingSwitch> pending;
  std::optional<preview::PreviewInput> raw_pending;
};

struct StepResult {
  PlantInput u;
  /// Target-set id for trace logs, e.g. "hold[2]" or "reach[2][0]" (nodes
  /// are 1-based in labels, chain indices are literal).
  std::string target;
  ControllerState next;
};

/// Evaluates the controller encoded by a converged SynthesisCertificate:
/// holding control walks the hold chain down to its invariant core, and an
/// announced switch hands over to the per-edge reachability chain so the
/// state reaches the destination's winning set exactly at the switch.
class Controller {
 public:
  /// Copies the plant and automaton; takes the certificate by value.
  /// Requires a converged certificate whose reduced automaton matches
  /// reduce_to_lower_bounds(raw).
  Controller(sys::SwitchedSystem system, preview::PreviewAutomaton raw,
             synth::SynthesisCertificate cert, double eps = 1e-7);

  /// State for a run starting at node q0 with plant state x. Rejects starts
  /// outside the winning set unless allow_unsafe is set.
  ControllerState initial(int q0, const PlantState& x,
                          bool allow_unsafe = false) const;

  /// Buffers an announcement issued now. Validates the edge and preview
  /// window against the raw automaton, the dwell requirement against
  /// steps_in_mode, and rejects overlapping announcements.
  ControllerState receive_preview(const ControllerState& cs,
                                  const preview::PreviewInput& p) const;

  /// One control step. Requires that a due switch (countdown 0) has already
  /// been applied via on_switch.
  StepResult step(const ControllerState& cs, const PlantState& x) const;

  /// Applies an announced switch that is due this instant.
  ControllerState on_switch(const ControllerState& cs, int new_mode) const;

  const synth::SynthesisCertificate& certificate() const { return cert_; }
  const sys::SwitchedSystem& system() const { return system_; }
  const preview::PreviewAutomaton& automaton() const { return raw_; }
  double eps() const { return eps_; }

 private:
  const synth::NodeCertificate& node_cert(int mode) const;
  PlantInput choose_input(int mode, const PlantState& x,
                          const sys::StateSet& target) const;

  sys::SwitchedSystem system_;
  preview::PreviewAutomaton raw_;
  synth::SynthesisCertificate cert_;
  double eps_;
};

}  // namespace presyn::control
