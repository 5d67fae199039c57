#pragma once

#include <string>
#include <vector>

#include "presyn/preview/automaton.hpp"
#include "presyn/systems/switched_system.hpp"

namespace presyn::oracle {

/// One phase of the expanded environment: either counting time since the
/// node was entered with nothing announced yet (clock, saturating once more
/// waiting changes nothing), or counting down a pending announcement.
struct Phase {
  enum Kind { Clock, Pending };
  int node = 0;
  Kind kind = Clock;
  int elapsed = 0;     // Clock: saturating steps since entry
  int edge = -1;       // Pending: index into the automaton's edge list
  int remaining = 0;   // Pending: steps until the switch lands

  std::string label() const;
};

/// Explicit finite transition system over phases. Successors are the
/// environment's one-step choices; entry[q] lists the phases the environment
/// may present at the instant node q is entered (nothing announced, or an
/// announcement issued immediately whose preview time covers the whole
/// holding period).
struct PhaseGraph {
  std::vector<Phase> phases;
  std::vector<std::vector<int>> succ;
  std::vector<std::vector<int>> entry;
  std::vector<int> per_node_count;

  int num_nodes() const { return static_cast<int>(entry.size()); }
};

/// Phase graph of a reduced automaton (every preview window a singleton).
/// Throws SpecError on structural violations or non-singleton windows.
PhaseGraph expand_automaton(const preview::PreviewAutomaton& g);

/// Phase graph letting the environment pick any preview time in each edge's
/// window, truncated `cap` above the lower bound when the window is wider
/// (longer warnings only help the controller, so truncation does not change
/// the winning sets).
PhaseGraph expand_with_intervals(const preview::PreviewAutomaton& g,
                                 int cap = 4);

struct GameResult {
  /// Safe-game fixed point per phase, over plant state ids.
  std::vector<sys::FiniteSet> phase_win;
  /// Winning set per node: states winning from every entry phase.
  std::vector<sys::FiniteSet> node_win;
  int iterations = 0;
};

/// Brute-force safety game on the product of a finite plant with the phase
/// graph. The controller sees the full product state; the plant successor and
/// the environment's phase move are both adversarial.
GameResult solve_product_game(const sys::SwitchedSystem& plant,
                              const PhaseGraph& graph,
                              const std::vector<sys::StateSet>& safety);

}  // namespace presyn::oracle
