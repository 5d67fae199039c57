#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace presyn::preview {

/// Integer interval [lo, hi]; hi absent means unbounded above.
struct TimeInterval {
  int lo = 0;
  std::optional<int> hi;

  bool contains(int t) const { return t >= lo && (!hi || t <= *hi); }
  bool singleton() const { return hi && *hi == lo; }
};

struct Edge {
  int from = 0;
  int to = 0;
  TimeInterval preview;
};

/// Switching assumptions: which mode follows which, how far ahead the switch
/// is announced, and how long a mode is held. Node ids are 0-based here; the
/// io layer converts to the 1-based external labels. A node with no outgoing
/// edges is a sink and must have an infinite holding time (no deadlocks: the
/// system stays there forever).
struct PreviewAutomaton {
  int num_nodes = 0;
  std::vector<Edge> edges;
  std::vector<std::optional<int>> holding;  // nullopt = infinite

  std::vector<int> out_edges(int q) const;
  bool is_sink(int q) const;
  const Edge* find_edge(int from, int to) const;
  /// Smallest preview lower bound over outgoing edges; requires non-sink.
  int min_preview(int q) const;
};

/// One announcement: at time t the environment reveals that the mode switches
/// to dest at time t + tau.
struct PreviewInput {
  int t = 0;
  int tau = 0;
  int dest = 0;
};

struct Violation {
  std::string rule;
  std::string detail;
};

/// Structural checks; empty result means well-formed. Violations are data,
/// not exceptions, so a CLI can print all of them.
std::vector<Violation> validate_automaton(const PreviewAutomaton& g);

struct SequenceCheck {
  bool valid = true;
  int index = -1;  // offending element, 0-based
  int clause = 0;  // 1 ordering, 2 edge/preview-time, 3 holding
  std::string detail;
};

/// Checks an input sequence against the three admissibility clauses: previews
/// are issued no earlier than the previous switch, each hop follows an edge
/// with an allowed preview time, and consecutive switches are separated by at
/// least the holding time of the node being left.
SequenceCheck validate_input_sequence(const PreviewAutomaton& g, int q0,
                                      const std::vector<PreviewInput>& seq);

struct ExecutionStep {
  int begin = 0;
  std::optional<int> end;  // inclusive; absent for the final open interval
  int node = 0;
};

/// Mode trajectory induced by a valid input sequence: contiguous integer
/// intervals labeled by the active node. Throws SpecError on invalid input.
std::vector<ExecutionStep> execution_of(const PreviewAutomaton& g, int q0,
                                        const std::vector<PreviewInput>& seq);

/// Pessimistic variant with every preview window collapsed to its lower
/// bound. Winning sets are insensitive to this reduction, so synthesis runs
/// on the reduced automaton.
PreviewAutomaton reduce_to_lower_bounds(const PreviewAutomaton& g);

/// Rewrites an announcement of the original automaton as the matching
/// announcement of the reduced one: same switch instant, preview window
/// shrunk to the edge's lower bound (so it may be dated before it would be
/// admissible; consumers buffer early announcements).
PreviewInput infer_reduced_input(const PreviewAutomaton& g, int from,
                                 const PreviewInput& raw);

/// Admissible random sequence with at most max_switches announcements (fewer
/// if a sink is reached). Preview times are drawn from the edge window,
/// truncated 16 above the lower bound when unbounded; slack beyond the
/// minimum dwell is drawn from [0, 8].
std::vector<PreviewInput> random_input_sequence(const PreviewAutomaton& g,
                                                int q0, int max_switches,
                                                std::mt19937_64& rng);

}  // namespace presyn::preview
