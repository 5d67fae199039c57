#include "presyn/io/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "presyn/errors.hpp"
#include "presyn/geometry/polytope.hpp"

namespace presyn::io {

namespace {

[[noreturn]] void fail(const std::string& ctx, const std::string& msg) {
  throw SpecError(ctx + ": " + msg);
}

const json& member(const json& j, const char* key, const std::string& ctx) {
  if (!j.is_object()) fail(ctx, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(ctx, std::string("missing field '") + key + "'");
  return *it;
}

double number_at(const json& j, const std::string& ctx) {
  if (!j.is_number()) fail(ctx, "expected a number");
  return j.get<double>();
}

int integer_at(const json& j, const std::string& ctx) {
  if (!j.is_number_integer()) fail(ctx, "expected an integer");
  return j.get<int>();
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

}  // namespace

Eigen::VectorXd vector_from_json(const json& j, const std::string& ctx) {
  if (!j.is_array()) fail(ctx, "expected an array of numbers");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<int>(i)) =
        number_at(j[i], ctx + "[" + std::to_string(i) + "]");
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& ctx) {
  if (!j.is_array()) fail(ctx, "expected an array of rows");
  const std::size_t rows = j.size();
  Eigen::MatrixXd m(0, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    const Eigen::VectorXd row =
        vector_from_json(j[r], ctx + "[" + std::to_string(r) + "]");
    if (r == 0) {
      m.resize(static_cast<int>(rows), row.size());
    } else if (row.size() != m.cols()) {
      fail(ctx, "rows have inconsistent widths");
    }
    m.row(static_cast<int>(r)) = row.transpose();
  }
  return m;
}

json to_json(const geom::Polytope& p) {
  return {{"dim", p.dim()}, {"A", matrix_to_json(p.A())},
          {"b", vector_to_json(p.b())}};
}

geom::Polytope polytope_from_json(const json& j, const std::string& ctx) {
  if (!j.is_object()) fail(ctx, "expected a set object");
  if (j.contains("interval")) {
    const Eigen::VectorXd iv = vector_from_json(j["interval"], ctx + ".interval");
    if (iv.size() != 2) fail(ctx + ".interval", "expected [lo, hi]");
    if (iv(0) > iv(1)) fail(ctx + ".interval", "lo exceeds hi");
    return geom::Polytope::interval(iv(0), iv(1));
  }
  if (j.contains("box")) {
    const json& box = j["box"];
    const Eigen::VectorXd lo = vector_from_json(member(box, "lo", ctx + ".box"),
                                         ctx + ".box.lo");
    const Eigen::VectorXd hi = vector_from_json(member(box, "hi", ctx + ".box"),
                                         ctx + ".box.hi");
    if (lo.size() != hi.size() || lo.size() == 0)
      fail(ctx + ".box", "lo and hi must have the same positive length");
    if (((hi - lo).array() < 0.0).any()) fail(ctx + ".box", "lo exceeds hi");
    return geom::Polytope::box(lo, hi);
  }
  const Eigen::MatrixXd A = matrix_from_json(member(j, "A", ctx), ctx + ".A");
  const Eigen::VectorXd b = vector_from_json(member(j, "b", ctx), ctx + ".b");
  if (b.size() != A.rows()) fail(ctx, "A and b row counts differ");
  int dim = A.cols();
  if (j.contains("dim")) {
    dim = integer_at(j["dim"], ctx + ".dim");
    if (A.rows() > 0 && dim != A.cols())
      fail(ctx, "dim disagrees with the width of A");
  } else if (A.rows() == 0) {
    fail(ctx, "dim is required when A has no rows");
  }
  if (dim < 1) fail(ctx, "dimension must be positive");
  if (A.rows() == 0) return geom::Polytope::universe(dim);
  return geom::Polytope(A, b);
}

json to_json(const sys::FiniteSet& s) {
  json ids = json::array();
  for (int id : s.ids()) ids.push_back(id + 1);
  return {{"states", std::move(ids)}};
}

sys::FiniteSet finite_set_from_json(const json& j, int universe,
                                    const std::string& ctx) {
  if (!j.is_object() || !j.contains("states"))
    fail(ctx, "expected {\"states\": [...]}");
  const json& arr = j["states"];
  if (!arr.is_array()) fail(ctx + ".states", "expected an array");
  sys::FiniteSet out(universe);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const int id =
        integer_at(arr[i], ctx + ".states[" + std::to_string(i) + "]");
    if (id < 1 || id > universe)
      fail(ctx + ".states[" + std::to_string(i) + "]",
           "state id " + std::to_string(id) + " outside 1.." +
               std::to_string(universe));
    out.insert(id - 1);
  }
  return out;
}

json to_json(const sys::StateSet& s) {
  if (sys::ss_is_finite(s)) return to_json(sys::ss_fin(s));
  return to_json(sys::ss_pol(s));
}

sys::StateSet state_set_from_json(const json& j, bool finite, int universe,
                                  const std::string& ctx) {
  if (finite) return finite_set_from_json(j, universe, ctx);
  return polytope_from_json(j, ctx);
}

json to_json(const preview::PreviewAutomaton& g) {
  json edges = json::array();
  for (const auto& e : g.edges) {
    json pv = json::array();
    pv.push_back(e.preview.lo);
    if (e.preview.hi)
      pv.push_back(*e.preview.hi);
    else
      pv.push_back(nullptr);
    edges.push_back(
        {{"from", e.from + 1}, {"to", e.to + 1}, {"preview", std::move(pv)}});
  }
  json holding = json::array();
  for (const auto& h : g.holding) {
    if (h)
      holding.push_back(*h);
    else
      holding.push_back(nullptr);
  }
  return {{"nodes", g.num_nodes}, {"edges", std::move(edges)},
          {"holding", std::move(holding)}};
}

preview::PreviewAutomaton automaton_from_json(const json& j,
                                              const std::string& ctx) {
  preview::PreviewAutomaton g;
  g.num_nodes = integer_at(member(j, "nodes", ctx), ctx + ".nodes");
  const json& edges = member(j, "edges", ctx);
  if (!edges.is_array()) fail(ctx + ".edges", "expected an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string ectx = ctx + ".edges[" + std::to_string(i) + "]";
    const json& ej = edges[i];
    preview::Edge e;
    e.from = integer_at(member(ej, "from", ectx), ectx + ".from") - 1;
    e.to = integer_at(member(ej, "to", ectx), ectx + ".to") - 1;
    const json& pv = member(ej, "preview", ectx);
    if (!pv.is_array() || pv.size() != 2)
      fail(ectx + ".preview", "expected [lo, hi] with hi an integer or null");
    e.preview.lo = integer_at(pv[0], ectx + ".preview[0]");
    if (pv[1].is_null())
      e.preview.hi = std::nullopt;
    else
      e.preview.hi = integer_at(pv[1], ectx + ".preview[1]");
    g.edges.push_back(e);
  }
  const json& holding = member(j, "holding", ctx);
  if (!holding.is_array() ||
      static_cast<int>(holding.size()) != g.num_nodes)
    fail(ctx + ".holding", "expected one entry per node");
  for (std::size_t i = 0; i < holding.size(); ++i) {
    if (holding[i].is_null())
      g.holding.push_back(std::nullopt);
    else
      g.holding.push_back(
          integer_at(holding[i], ctx + ".holding[" + std::to_string(i) + "]"));
  }
  return g;
}

namespace {

const char* status_name(sys::FixpointStatus s) {
  return s == sys::FixpointStatus::Converged ? "converged" : "iteration_capped";
}

sys::FixpointStatus status_from(const json& j, const std::string& ctx) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "converged") return sys::FixpointStatus::Converged;
    if (s == "iteration_capped") return sys::FixpointStatus::IterationCapped;
  }
  fail(ctx, "expected \"converged\" or \"iteration_capped\"");
}

}  // namespace

json to_json(const synth::SynthesisCertificate& cert) {
  json w = json::array();
  for (const auto& s : cert.winning.w) w.push_back(to_json(s));
  json safe = json::array();
  for (const auto& s : cert.safe) safe.push_back(to_json(s));
  json nodes = json::array();
  for (const auto& nc : cert.nodes) {
    json reach = json::object();
    for (const auto& [dest, chain] : nc.reach) {
      json arr = json::array();
      for (const auto& s : chain) arr.push_back(to_json(s));
      reach[std::to_string(dest + 1)] = std::move(arr);
    }
    json hold_chain = json::object();
    for (const auto& [k, s] : nc.hold_chain)
      hold_chain[std::to_string(k)] = to_json(s);
    json nj = {{"node", nc.node + 1},
               {"t_min", nc.t_min},
               {"reach", std::move(reach)},
               {"hold_chain", std::move(hold_chain)}};
    nj["hold"] = nc.hold ? json(*nc.hold) : json(nullptr);
    nodes.push_back(std::move(nj));
  }
  return {{"reduced", to_json(cert.reduced)},
          {"safe", std::move(safe)},
          {"winning",
           {{"sets", std::move(w)},
            {"status", status_name(cert.winning.status)},
            {"iterations", cert.winning.iterations}}},
          {"nodes", std::move(nodes)}};
}

synth::SynthesisCertificate certificate_from_json(const json& j, bool finite,
                                                  int universe,
                                                  const std::string& ctx) {
  synth::SynthesisCertificate cert;
  cert.reduced = automaton_from_json(member(j, "reduced", ctx), ctx + ".reduced");
  const json& safe = member(j, "safe", ctx);
  if (!safe.is_array()) fail(ctx + ".safe", "expected an array");
  for (std::size_t i = 0; i < safe.size(); ++i)
    cert.safe.push_back(state_set_from_json(
        safe[i], finite, universe, ctx + ".safe[" + std::to_string(i) + "]"));

  const json& winning = member(j, "winning", ctx);
  const json& sets = member(winning, "sets", ctx + ".winning");
  if (!sets.is_array()) fail(ctx + ".winning.sets", "expected an array");
  for (std::size_t i = 0; i < sets.size(); ++i)
    cert.winning.w.push_back(
        state_set_from_json(sets[i], finite, universe,
                            ctx + ".winning.sets[" + std::to_string(i) + "]"));
  cert.winning.status = status_from(member(winning, "status", ctx + ".winning"),
                                    ctx + ".winning.status");
  cert.winning.iterations = integer_at(
      member(winning, "iterations", ctx + ".winning"), ctx + ".winning.iterations");

  const json& nodes = member(j, "nodes", ctx);
  if (!nodes.is_array()) fail(ctx + ".nodes", "expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string nctx = ctx + ".nodes[" + std::to_string(i) + "]";
    const json& nj = nodes[i];
    synth::NodeCertificate nc;
    nc.node = integer_at(member(nj, "node", nctx), nctx + ".node") - 1;
    nc.t_min = integer_at(member(nj, "t_min", nctx), nctx + ".t_min");
    const json& hold = member(nj, "hold", nctx);
    nc.hold = hold.is_null()
                  ? std::nullopt
                  : std::optional<int>(integer_at(hold, nctx + ".hold"));
    const json& reach = member(nj, "reach", nctx);
    if (!reach.is_object()) fail(nctx + ".reach", "expected an object");
    for (const auto& [key, arr] : reach.items()) {
      const std::string rctx = nctx + ".reach." + key;
      int dest = 0;
      try {
        dest = std::stoi(key) - 1;
      } catch (...) {
        fail(rctx, "key must be a node id");
      }
      if (!arr.is_array()) fail(rctx, "expected an array of sets");
      std::vector<sys::StateSet> chain;
      for (std::size_t c = 0; c < arr.size(); ++c)
        chain.push_back(state_set_from_json(
            arr[c], finite, universe, rctx + "[" + std::to_string(c) + "]"));
      nc.reach.emplace(dest, std::move(chain));
    }
    const json& hc = member(nj, "hold_chain", nctx);
    if (!hc.is_object()) fail(nctx + ".hold_chain", "expected an object");
    for (const auto& [key, sj] : hc.items()) {
      const std::string hctx = nctx + ".hold_chain." + key;
      int k = 0;
      try {
        k = std::stoi(key);
      } catch (...) {
        fail(hctx, "key must be an integer chain index");
      }
      nc.hold_chain.emplace(k,
                            state_set_from_json(sj, finite, universe, hctx));
    }
    cert.nodes.push_back(std::move(nc));
  }
  return cert;
}

namespace {

json plant_state_to_json(const control::PlantState& x, bool finite) {
  if (finite) return std::get<int>(x) + 1;
  return vector_to_json(std::get<Eigen::VectorXd>(x));
}

json plant_input_to_json(const control::PlantInput& u, bool finite) {
  if (finite) return std::get<int>(u) + 1;
  return vector_to_json(std::get<Eigen::VectorXd>(u));
}

}  // namespace

json to_json(const sim::TraceStep& step, bool finite) {
  json row = {{"t", step.time},
              {"mode", step.mode + 1},
              {"x", plant_state_to_json(step.x, finite)},
              {"u", plant_input_to_json(step.u, finite)},
              {"target", step.target},
              {"switched", step.switched},
              {"safe", step.safe}};
  row["received"] =
      step.received
          ? json({{"t", step.received->t},
                  {"tau", step.received->tau},
                  {"dest", step.received->dest + 1}})
          : json(nullptr);
  row["margin"] = step.margin ? json(*step.margin) : json(nullptr);
  return row;
}

json trace_summary(const std::vector<sim::RunTrace>& runs) {
  int violations = 0;
  int infeasible = 0;
  std::optional<double> min_margin;
  for (const auto& r : runs) {
    violations += r.violation ? 1 : 0;
    infeasible += r.infeasible ? 1 : 0;
    if (r.min_margin)
      min_margin = min_margin ? std::min(*min_margin, *r.min_margin)
                              : *r.min_margin;
  }
  json out = {{"runs", runs.size()},
              {"violations", violations},
              {"infeasible", infeasible}};
  out["min_margin"] = min_margin ? json(*min_margin) : json(nullptr);
  return out;
}

json set_metrics(const sys::StateSet& s, double eps) {
  if (sys::ss_is_finite(s))
    return {{"kind", "finite"}, {"count", sys::ss_fin(s).count()}};
  const geom::Polytope& p = sys::ss_pol(s);
  const geom::Tol tol{eps};
  json out = {{"kind", "polytope"}, {"rows", p.rows()}};
  const bool empty = geom::is_empty(p, tol);
  out["empty"] = empty;
  if (empty) {
    out["bbox_volume"] = nullptr;
    out["chebyshev_radius"] = nullptr;
    return out;
  }
  try {
    const auto [lo, hi] = geom::bounding_box(p, tol);
    double vol = 1.0;
    for (int i = 0; i < lo.size(); ++i) vol *= hi(i) - lo(i);
    out["bbox_volume"] = vol;
  } catch (const Error&) {
    out["bbox_volume"] = nullptr;  // unbounded in some direction
  }
  try {
    out["chebyshev_radius"] = geom::chebyshev_center(p, tol).second;
  } catch (const Error&) {
    out["chebyshev_radius"] = nullptr;
  }
  return out;
}

}  // namespace presyn::io
