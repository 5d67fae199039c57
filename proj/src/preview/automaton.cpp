#include "presyn/preview/automaton.hpp"

#include <algorithm>
#include <set>

#include "presyn/errors.hpp"

namespace presyn::preview {

namespace {

std::string node_label(int q) { return "node " + std::to_string(q + 1); }

std::string edge_label(const Edge& e) {
  return "edge (" + std::to_string(e.from + 1) + "," +
         std::to_string(e.to + 1) + ")";
}

}  // namespace

std::vector<int> PreviewAutomaton::out_edges(int q) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (edges[i].from == q) out.push_back(static_cast<int>(i));
  return out;
}

bool PreviewAutomaton::is_sink(int q) const { return out_edges(q).empty(); }

const Edge* PreviewAutomaton::find_edge(int from, int to) const {
  for (const Edge& e : edges)
    if (e.from == from && e.to == to) return &e;
  return nullptr;
}

int PreviewAutomaton::min_preview(int q) const {
  const auto out = out_edges(q);
  if (out.empty()) throw Error(node_label(q) + " is a sink");
  int m = edges[out[0]].preview.lo;
  for (int i : out) m = std::min(m, edges[i].preview.lo);
  return m;
}

std::vector<Violation> validate_automaton(const PreviewAutomaton& g) {
  std::vector<Violation> out;
  auto flag = [&](std::string rule, std::string detail) {
    out.push_back({std::move(rule), std::move(detail)});
  };

  if (g.num_nodes < 1) flag("node-count", "automaton has no nodes");
  if (static_cast<int>(g.holding.size()) != g.num_nodes)
    flag("holding-size", "holding times must cover every node");

  std::set<std::pair<int, int>> seen;
  for (const Edge& e : g.edges) {
    if (e.from < 0 || e.from >= g.num_nodes || e.to < 0 ||
        e.to >= g.num_nodes) {
      flag("edge-range", edge_label(e) + " references a missing node");
      continue;
    }
    if (e.from == e.to) flag("self-loop", edge_label(e) + " is a self-loop");
    if (!seen.insert({e.from, e.to}).second)
      flag("duplicate-edge", edge_label(e) + " appears more than once");
    if (e.preview.lo < 0)
      flag("preview-interval", edge_label(e) + " has a negative lower bound");
    if (e.preview.hi && *e.preview.hi < e.preview.lo)
      flag("preview-interval", edge_label(e) + " has an empty window");
  }

  for (int q = 0; q < g.num_nodes && q < static_cast<int>(g.holding.size());
       ++q) {
    const bool sink = g.is_sink(q);
    const auto& h = g.holding[q];
    if (sink && h)
      flag("sink-holding", node_label(q) + " is a sink but has a finite "
                                           "holding time");
    if (!sink) {
      if (!h) {
        flag("holding-finite",
             node_label(q) + " has outgoing edges but an infinite holding "
                             "time");
      } else if (*h < 1) {
        flag("holding-positive", node_label(q) + " holding time must be >= 1");
      } else if (*h < g.min_preview(q)) {
        flag("holding-vs-preview",
             node_label(q) + " holding time is below the smallest preview "
                             "lower bound of its outgoing edges");
      }
    }
  }
  return out;
}

SequenceCheck validate_input_sequence(const PreviewAutomaton& g, int q0,
                                      const std::vector<PreviewInput>& seq) {
  if (q0 < 0 || q0 >= g.num_nodes) throw Error("initial node out of range");
  int prev_switch = 0;  // t_{k-1} + tau_{k-1}, with t_0 = tau_0 = 0
  int prev_node = q0;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const PreviewInput& in = seq[k];
    auto fail = [&](int clause, std::string detail) {
      return SequenceCheck{false, static_cast<int>(k), clause,
                           std::move(detail)};
    };
    if (in.t < prev_switch)
      return fail(1, "announcement " + std::to_string(k + 1) +
                         " is issued before the previous switch");
    if (in.dest < 0 || in.dest >= g.num_nodes)
      return fail(2, "announcement " + std::to_string(k + 1) +
                         " targets a missing node");
    const Edge* e = g.find_edge(prev_node, in.dest);
    if (!e)
      return fail(2, "no edge from " + node_label(prev_node) + " to " +
                         node_label(in.dest));
    if (!e->preview.contains(in.tau))
      return fail(2, "preview time " + std::to_string(in.tau) +
                         " outside the window of " + edge_label(*e));
    const auto& h = g.holding[prev_node];
    const int sw = in.t + in.tau;
    if (!h)
      return fail(3, node_label(prev_node) + " is never left (sink)");
    if (sw - prev_switch < *h)
      return fail(3, "switch at " + std::to_string(sw) + " leaves " +
                         node_label(prev_node) + " after " +
                         std::to_string(sw - prev_switch) +
                         " steps, below its holding time");
    prev_switch = sw;
    prev_node = in.dest;
  }
  return {};
}

std::vector<ExecutionStep> execution_of(const PreviewAutomaton& g, int q0,
                                        const std::vector<PreviewInput>& seq) {
  const SequenceCheck chk = validate_input_sequence(g, q0, seq);
  if (!chk.valid)
    throw SpecError("invalid preview input sequence: " + chk.detail);
  std::vector<ExecutionStep> out;
  int begin = 0;
  int node = q0;
  for (const PreviewInput& in : seq) {
    const int sw = in.t + in.tau;
    out.push_back({begin, sw - 1, node});
    if (begin > sw - 1)
      throw InvariantError("execution intervals must be nonempty");
    begin = sw;
    node = in.dest;
  }
  out.push_back({begin, std::nullopt, node});
  return out;
}

PreviewAutomaton reduce_to_lower_bounds(const PreviewAutomaton& g) {
  PreviewAutomaton r = g;
  for (Edge& e : r.edges) e.preview = {e.preview.lo, e.preview.lo};
  return r;
}

PreviewInput infer_reduced_input(const PreviewAutomaton& g, int from,
                                 const PreviewInput& raw) {
  const Edge* e = g.find_edge(from, raw.dest);
  if (!e)
    throw Error("no edge from " + node_label(from) + " to " +
                node_label(raw.dest));
  const int shrunk = e->preview.lo;
  return {raw.t + raw.tau - shrunk, shrunk, raw.dest};
}

std::vector<PreviewInput> random_input_sequence(const PreviewAutomaton& g,
                                                int q0, int max_switches,
                                                std::mt19937_64& rng) {
  std::vector<PreviewInput> seq;
  int prev_switch = 0;
  int node = q0;
  for (int k = 0; k < max_switches; ++k) {
    const auto out = g.out_edges(node);
    if (out.empty()) break;
    const Edge& e =
        g.edges[out[std::uniform_int_distribution<int>(
            0, static_cast<int>(out.size()) - 1)(rng)]];
    const int tau_hi =
        e.preview.hi ? std::min(*e.preview.hi, e.preview.lo + 16)
                     : e.preview.lo + 16;
    const int tau =
        std::uniform_int_distribution<int>(e.preview.lo, tau_hi)(rng);
    const int dwell = *g.holding[node];
    const int sw = prev_switch + std::max(dwell, tau) +
                   std::uniform_int_distribution<int>(0, 8)(rng);
    seq.push_back({sw - tau, tau, e.to});
    prev_switch = sw;
    node = e.to;
  }
  return seq;
}

}  // namespace presyn::preview
