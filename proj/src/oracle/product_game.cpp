#include "presyn/oracle/product_game.hpp"

#include <algorithm>
#include <map>

#include "presyn/errors.hpp"

namespace presyn::oracle {

namespace {

// Allowed preview times per edge: the whole (possibly truncated) window for
// interval expansion, just the lower bound for reduced automatons.
using EdgeChoices = std::vector<std::vector<int>>;

PhaseGraph build(const preview::PreviewAutomaton& g,
                 const EdgeChoices& choices) {
  const auto violations = preview::validate_automaton(g);
  if (!violations.empty())
    throw SpecError("malformed preview automaton: " + violations[0].detail);

  PhaseGraph pg;
  pg.entry.resize(g.num_nodes);
  pg.per_node_count.assign(g.num_nodes, 0);

  // Phase ids, nodes first grouped together: clock phases then one countdown
  // chain per outgoing edge (up to its largest allowed preview time).
  std::map<std::pair<int, int>, int> clock_id;    // (node, elapsed)
  std::map<std::pair<int, int>, int> pending_id;  // (edge, remaining)
  auto add = [&](const Phase& p) {
    pg.phases.push_back(p);
    pg.per_node_count[p.node]++;
    return static_cast<int>(pg.phases.size()) - 1;
  };

  std::vector<int> saturation(g.num_nodes, 0);
  for (int q = 0; q < g.num_nodes; ++q) {
    if (!g.is_sink(q)) {
      int min_lo = g.edges[g.out_edges(q)[0]].preview.lo;
      for (int e : g.out_edges(q))
        min_lo = std::min(min_lo, g.edges[e].preview.lo);
      saturation[q] = std::max(0, *g.holding[q] - min_lo - 1);
    }
    for (int n = 0; n <= saturation[q]; ++n)
      clock_id[{q, n}] = add({q, Phase::Clock, n, -1, 0});
    for (int e : g.out_edges(q)) {
      const int tau_max =
          *std::max_element(choices[e].begin(), choices[e].end());
      for (int l = 1; l <= tau_max; ++l)
        pending_id[{e, l}] = add({g.edges[e].from, Phase::Pending, 0, e, l});
    }
  }

  // Entry closure: fresh clock, plus any announcement the environment can
  // date at the entry instant itself (preview spanning the full hold).
  for (int q = 0; q < g.num_nodes; ++q) {
    pg.entry[q].push_back(clock_id.at({q, 0}));
    for (int e : g.out_edges(q))
      for (int tau : choices[e])
        if (tau >= *g.holding[q])
          pg.entry[q].push_back(pending_id.at({e, tau}));
  }

  pg.succ.resize(pg.phases.size());
  for (std::size_t pid = 0; pid < pg.phases.size(); ++pid) {
    const Phase& p = pg.phases[pid];
    auto& s = pg.succ[pid];
    if (p.kind == Phase::Clock) {
      const int q = p.node;
      s.push_back(clock_id.at({q, std::min(p.elapsed + 1, saturation[q])}));
      if (g.is_sink(q)) continue;
      const int hold = *g.holding[q];
      for (int e : g.out_edges(q))
        for (int tau : choices[e]) {
          if (p.elapsed + 1 + tau < hold) continue;
          if (tau == 0) {
            // Announcement and switch land together on the next step.
            for (int ep : pg.entry[g.edges[e].to]) s.push_back(ep);
          } else {
            s.push_back(pending_id.at({e, tau}));
          }
        }
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
    } else if (p.remaining > 1) {
      s.push_back(pending_id.at({p.edge, p.remaining - 1}));
    } else {
      s = pg.entry[g.edges[p.edge].to];
    }
  }
  return pg;
}

}  // namespace

std::string Phase::label() const {
  if (kind == Clock)
    return "node " + std::to_string(node + 1) + " clock " +
           std::to_string(elapsed);
  return "node " + std::to_string(node + 1) + " pending edge " +
         std::to_string(edge) + " in " + std::to_string(remaining);
}

PhaseGraph expand_automaton(const preview::PreviewAutomaton& g) {
  EdgeChoices choices(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (!g.edges[e].preview.singleton())
      throw SpecError(
          "expansion needs singleton preview windows; reduce the automaton "
          "first");
    choices[e] = {g.edges[e].preview.lo};
  }
  return build(g, choices);
}

PhaseGraph expand_with_intervals(const preview::PreviewAutomaton& g, int cap) {
  if (cap < 0) throw Error("interval cap must be nonnegative");
  EdgeChoices choices(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& w = g.edges[e].preview;
    const int hi = w.hi ? std::min(*w.hi, w.lo + cap) : w.lo + cap;
    for (int tau = w.lo; tau <= hi; ++tau) choices[e].push_back(tau);
  }
  return build(g, choices);
}

GameResult solve_product_game(const sys::SwitchedSystem& plant,
                              const PhaseGraph& graph,
                              const std::vector<sys::StateSet>& safety) {
  if (!plant.finite())
    throw Error("the product-game oracle needs a finite plant");
  const auto& fp = plant.fin();
  if (static_cast<int>(fp.modes.size()) != graph.num_nodes())
    throw DimensionError("plant modes and automaton nodes must coincide");
  if (static_cast<int>(safety.size()) != graph.num_nodes())
    throw DimensionError("safety sets must cover every node");

  const int P = static_cast<int>(graph.phases.size());
  std::vector<sys::FiniteSet> z(P);
  for (int p = 0; p < P; ++p) {
    plant.check_backend(safety[graph.phases[p].node]);
    z[p] = ss_fin(safety[graph.phases[p].node]);
  }

  GameResult out;
  for (bool changed = true; changed; ++out.iterations) {
    changed = false;
    std::vector<sys::FiniteSet> next(P);
    for (int p = 0; p < P; ++p) {
      const auto& tr = fp.modes[graph.phases[p].node].transitions;
      sys::FiniteSet target = sys::FiniteSet::full(fp.num_states);
      for (int q : graph.succ[p]) target = target.intersect(z[q]);
      sys::FiniteSet keep(fp.num_states);
      for (int x : z[p].ids()) {
        for (int u = 0; u < fp.num_inputs; ++u) {
          bool ok = true;
          for (int nx : tr[x][u]) ok = ok && target.contains(nx);
          if (ok) {
            keep.insert(x);
            break;
          }
        }
      }
      if (!(keep == z[p])) changed = true;
      next[p] = std::move(keep);
    }
    z = std::move(next);
  }

  out.node_win.reserve(graph.num_nodes());
  for (int q = 0; q < graph.num_nodes(); ++q) {
    sys::FiniteSet w = sys::FiniteSet::full(fp.num_states);
    for (int p : graph.entry[q]) w = w.intersect(z[p]);
    out.node_win.push_back(std::move(w));
  }
  out.phase_win = std::move(z);
  return out;
}

}  // namespace presyn::oracle
