#pragma once

#include <optional>
#include <random>
#include <vector>

#include "presyn/preview/automaton.hpp"
#include "presyn/systems/switched_system.hpp"

namespace presyn::testsup {

struct FiniteInstance {
  sys::FinitePlant plant;
  preview::PreviewAutomaton g;
  std::vector<sys::StateSet> safety;
};

// Toy 3-state plant used across test binaries; mode ids align with the
// two-node announcement automaton.
inline sys::FinitePlant toy_plant() {
  sys::FinitePlant p;
  p.num_states = 3;
  p.num_inputs = 2;
  p.modes.resize(2);
  p.modes[0].transitions = {{{0}, {1}}, {{2}, {2}}, {{2}, {2}}};
  p.modes[1].transitions = {{{2}, {2}}, {{1}, {0}}, {{2}, {2}}};
  return p;
}

inline preview::PreviewAutomaton toy_automaton(int hold = 3, int tau = 1) {
  preview::PreviewAutomaton g;
  g.num_nodes = 2;
  g.edges = {{0, 1, {tau, tau}}, {1, 0, {tau, tau}}};
  g.holding = {hold, hold};
  return g;
}

// Random well-formed instance within the small ranges the brute-force oracle
// can afford: <= 8 plant states, <= 2 inputs, <= 3 nodes, holds <= 4,
// preview lower bounds <= 3 (wider windows optional).
inline FiniteInstance random_finite_instance(std::mt19937_64& rng,
                                             bool interval_windows) {
  auto draw = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };

  FiniteInstance inst;
  const int nodes = draw(2, 3);
  const int states = draw(2, 8);
  const int inputs = draw(1, 2);

  inst.g.num_nodes = nodes;
  for (int q = 0; q < nodes; ++q) {
    const bool sink = draw(0, 4) == 0;
    if (sink) {
      inst.g.holding.push_back(std::nullopt);
      continue;
    }
    const int hold = draw(1, 4);
    inst.g.holding.push_back(hold);
    std::vector<int> targets;
    for (int r = 0; r < nodes; ++r)
      if (r != q) targets.push_back(r);
    std::shuffle(targets.begin(), targets.end(), rng);
    const int deg = draw(1, static_cast<int>(targets.size()));
    int first_edge = static_cast<int>(inst.g.edges.size());
    for (int e = 0; e < deg; ++e) {
      preview::TimeInterval w;
      w.lo = draw(0, 3);
      if (interval_windows && draw(0, 4) == 0)
        w.hi = std::nullopt;
      else if (interval_windows)
        w.hi = w.lo + draw(0, 3);
      else
        w.hi = w.lo;
      inst.g.edges.push_back({q, targets[e], w});
    }
    // Keep the standing assumption: the hold covers the smallest preview.
    int min_lo = inst.g.edges[first_edge].preview.lo;
    for (int e = first_edge; e < static_cast<int>(inst.g.edges.size()); ++e)
      min_lo = std::min(min_lo, inst.g.edges[e].preview.lo);
    if (min_lo > hold) {
      auto& w = inst.g.edges[first_edge + draw(0, deg - 1)].preview;
      w.lo = hold;
      if (!interval_windows)
        w.hi = w.lo;
      else if (w.hi && *w.hi < w.lo)
        w.hi = w.lo;
    }
  }

  inst.plant.num_states = states;
  inst.plant.num_inputs = inputs;
  inst.plant.modes.resize(nodes);
  for (int m = 0; m < nodes; ++m) {
    auto& tr = inst.plant.modes[m].transitions;
    tr.assign(states, std::vector<std::vector<int>>(inputs));
    for (int x = 0; x < states; ++x)
      for (int u = 0; u < inputs; ++u) {
        const int deg = draw(0, 9) < 7 ? 1 : 2;
        for (int k = 0; k < deg; ++k) {
          const int nx = draw(0, states - 1);
          if (std::find(tr[x][u].begin(), tr[x][u].end(), nx) ==
              tr[x][u].end())
            tr[x][u].push_back(nx);
        }
      }
  }

  for (int q = 0; q < nodes; ++q) {
    sys::FiniteSet s(states);
    for (int x = 0; x < states; ++x)
      if (draw(0, 3) != 0) s.insert(x);
    inst.safety.emplace_back(std::move(s));
  }
  return inst;
}

}  // namespace presyn::testsup
