#include "presyn/synthesis/winning.hpp"

#include <algorithm>

#include "presyn/errors.hpp"

namespace presyn::synth {

namespace {

void check_inside(const sys::StateSet& inner, const sys::StateSet& outer,
                  double eps, const char* what) {
  if (!sys::ss_is_subset(inner, outer, eps)) throw InvariantError(what);
}

}  // namespace

InvPreResult inv_pre(const sys::SwitchedSystem& system,
                     const preview::PreviewAutomaton& g_hat, int node,
                     const std::vector<sys::StateSet>& w,
                     const std::vector<sys::StateSet>& s,
                     const sys::FixpointOptions& opts) {
  if (node < 0 || node >= g_hat.num_nodes)
    throw Error("node index out of range");
  if (g_hat.is_sink(node))
    throw Error("inv_pre expects a non-sink node; sinks use plain invariance");
  if (static_cast<int>(w.size()) != g_hat.num_nodes ||
      static_cast<int>(s.size()) != g_hat.num_nodes)
    throw DimensionError("winning and safe collections must cover every node");

  const geom::Tol tol{opts.eps};
  const sys::StateSet& safe = s[node];

  InvPreResult out;
  out.cert.node = node;
  out.cert.hold = g_hat.holding[node];

  // Backward reach chains per announced destination.
  int t_min = -1;
  std::vector<std::pair<int, int>> post;  // (destination, preview steps)
  for (int e : g_hat.out_edges(node)) {
    const preview::Edge& edge = g_hat.edges[e];
    if (!edge.preview.singleton())
      throw SpecError("inv_pre needs singleton preview windows");
    post.push_back({edge.to, edge.preview.lo});
    t_min = t_min < 0 ? edge.preview.lo : std::min(t_min, edge.preview.lo);

    std::vector<sys::StateSet> chain{w[edge.to]};
    for (int l = 1; l <= edge.preview.lo; ++l)
      chain.push_back(pre_int(system, node, chain[l - 1], safe, tol));
    out.cert.reach[edge.to] = std::move(chain);
  }
  out.cert.t_min = t_min;

  // Invariance core where every destination stays reachable in time. The
  // chains land inside S[node] except zero-step ones, so the safe set joins
  // the intersection explicitly.
  sys::StateSet core = safe;
  for (const auto& [j, steps] : post)
    core = ss_intersect(core, out.cert.reach[j][steps], tol);
  sys::InvResult inv_core = inv(system, node, core, opts);
  out.capped = inv_core.status == sys::FixpointStatus::IterationCapped;
  out.cert.hold_chain[t_min] = inv_core.set;

  // Forward hold chain: able to stay safe one more step, and whenever a
  // destination could still be announced this far from the switch, able to
  // honor it.
  sys::StateSet cur = inv_core.set;
  const int hold = *g_hat.holding[node];
  for (int k = t_min + 1; k <= hold; ++k) {
    cur = pre_int(system, node, cur, safe, tol);
    for (const auto& [j, steps] : post)
      if (steps >= k) cur = ss_intersect(cur, out.cert.reach[j][steps], tol);
    out.cert.hold_chain[k] = cur;
  }

  out.set = out.cert.hold_chain.rbegin()->second;
  check_inside(out.set, safe, opts.eps, "inv_pre result must stay safe");
  return out;
}

SynthesisCertificate con_inv(const sys::SwitchedSystem& system,
                             const preview::PreviewAutomaton& g,
                             const std::vector<sys::StateSet>& s,
                             const sys::FixpointOptions& opts) {
  const auto violations = preview::validate_automaton(g);
  if (!violations.empty())
    throw SpecError("malformed preview automaton: " + violations[0].detail);
  if (g.num_nodes != system.num_modes())
    throw DimensionError("automaton nodes and plant modes must coincide");
  if (static_cast<int>(s.size()) != g.num_nodes)
    throw DimensionError("safety sets must cover every node");
  for (const auto& si : s) system.check_backend(si);

  SynthesisCertificate cert;
  cert.reduced = preview::reduce_to_lower_bounds(g);
  cert.safe = s;
  cert.nodes.resize(g.num_nodes);
  cert.winning.w = s;

  bool sink_capped = false;
  for (int q = 0; q < g.num_nodes; ++q) {
    cert.nodes[q].node = q;
    if (!cert.reduced.is_sink(q)) continue;
    sys::InvResult r = inv(system, q, s[q], opts);
    sink_capped |= r.status == sys::FixpointStatus::IterationCapped;
    cert.winning.w[q] = r.set;
    cert.nodes[q].hold_chain[0] = std::move(r.set);
  }

  std::vector<int> order;
  for (int q = 0; q < g.num_nodes; ++q)
    if (!cert.reduced.is_sink(q)) order.push_back(q);

  bool sweep_capped = false;
  bool converged = order.empty();
  while (cert.winning.iterations < opts.max_iters && !converged) {
    ++cert.winning.iterations;
    sweep_capped = false;
    converged = true;
    for (int q : order) {
      InvPreResult r =
          inv_pre(system, cert.reduced, q, cert.winning.w, s, opts);
      sweep_capped |= r.capped;
      check_inside(r.set, cert.winning.w[q], opts.eps,
                   "sweep updates must be non-expanding");
      if (!sys::ss_is_subset(cert.winning.w[q], r.set, opts.eps))
        converged = false;
      cert.winning.w[q] = std::move(r.set);
      cert.nodes[q] = std::move(r.cert);
    }
  }

  cert.winning.status = (converged && !sweep_capped && !sink_capped)
                            ? sys::FixpointStatus::Converged
                            : sys::FixpointStatus::IterationCapped;
  return cert;
}

bool verify_fixed_point(const sys::SwitchedSystem& system,
                        const SynthesisCertificate& cert,
                        const sys::FixpointOptions& opts) {
  if (static_cast<int>(cert.winning.w.size()) != cert.reduced.num_nodes ||
      static_cast<int>(cert.safe.size()) != cert.reduced.num_nodes)
    throw DimensionError("certificate sets must cover every node");
  for (int q = 0; q < cert.reduced.num_nodes; ++q) {
    if (cert.reduced.is_sink(q)) {
      sys::InvResult r = inv(system, q, cert.safe[q], opts);
      if (r.status != sys::FixpointStatus::Converged) return false;
      if (!sys::ss_equal(r.set, cert.winning.w[q], opts.eps)) return false;
    } else {
      InvPreResult r =
          inv_pre(system, cert.reduced, q, cert.winning.w, cert.safe, opts);
      if (r.capped || !sys::ss_equal(r.set, cert.winning.w[q], opts.eps))
        return false;
    }
  }
  return true;
}

sys::SwitchedSystem merge_modes(const sys::SwitchedSystem& system) {
  if (system.finite()) {
    const auto& fp = system.fin();
    sys::FinitePlant merged;
    merged.num_states = fp.num_states;
    merged.num_inputs = fp.num_inputs;
    merged.modes.resize(1);
    auto& tr = merged.modes[0].transitions;
    tr.assign(fp.num_states,
              std::vector<std::vector<int>>(fp.num_inputs));
    for (int x = 0; x < fp.num_states; ++x)
      for (int u = 0; u < fp.num_inputs; ++u) {
        std::vector<int>& all = tr[x][u];
        for (const auto& mode : fp.modes)
          for (int nx : mode.transitions[x][u])
            if (std::find(all.begin(), all.end(), nx) == all.end())
              all.push_back(nx);
        std::sort(all.begin(), all.end());
      }
    return sys::SwitchedSystem(std::move(merged));
  }

  const auto& ap = system.aff();
  const auto& first = ap.modes[0];
  for (const auto& md : ap.modes) {
    if (!md.A.isApprox(first.A) || !md.B.isApprox(first.B) ||
        !md.E.isApprox(first.E) || !md.K.isApprox(first.K) ||
        md.D.dim() != first.D.dim())
      throw SpecError(
          "baseline merge needs identical dynamics across modes; only the "
          "disturbance ranges may differ");
  }
  Eigen::VectorXd lo, hi;
  for (const auto& md : ap.modes) {
    auto [l, h] = geom::bounding_box(md.D);
    if (lo.size() == 0) {
      lo = l;
      hi = h;
    } else {
      lo = lo.cwiseMin(l);
      hi = hi.cwiseMax(h);
    }
  }
  sys::AffinePlant merged;
  merged.X = ap.X;
  merged.U = ap.U;
  merged.modes.push_back(sys::AffineMode{first.A, first.B, first.E, first.K,
                                         geom::Polytope::box(lo, hi)});
  return sys::SwitchedSystem(std::move(merged));
}

sys::InvResult max_controlled_invariant(const sys::SwitchedSystem& merged,
                                        const sys::StateSet& s_hull,
                                        const sys::FixpointOptions& opts) {
  if (merged.num_modes() != 1)
    throw Error("the baseline expects a single merged mode");
  return inv(merged, 0, s_hull, opts);
}

}  // namespace presyn::synth
