#include "presyn/sim/simulator.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <utility>

#include "presyn/errors.hpp"
#include "presyn/geometry/vertex_enum.hpp"

namespace presyn::sim {

namespace {

// Per-mode disturbance geometry, computed once per run: vertex extremes and a
// sampling box with a guaranteed-feasible fallback point.
class DisturbanceSampler {
 public:
  explicit DisturbanceSampler(const sys::AffinePlant& plant, double eps) {
    const geom::Tol tol{eps};
    for (const auto& md : plant.modes) {
      if (md.D.dim() <= 3)
        vertices_.push_back(geom::enumerate_vertices(md.D, tol));
      else
        vertices_.emplace_back();
      boxes_.push_back(geom::bounding_box(md.D, tol));
      centers_.push_back(geom::chebyshev_center(md.D, tol).first);
    }
  }

  Eigen::VectorXd sample(const sys::AffinePlant& plant, int mode,
                         std::mt19937_64& rng) const {
    std::bernoulli_distribution extreme(0.5);
    const auto& vs = vertices_[mode];
    if (!vs.empty() && extreme(rng)) {
      std::uniform_int_distribution<std::size_t> pick(0, vs.size() - 1);
      return vs[pick(rng)];
    }
    const auto& [lo, hi] = boxes_[mode];
    const auto& D = plant.modes[mode].D;
    Eigen::VectorXd d(D.dim());
    for (int attempt = 0; attempt < 64; ++attempt) {
      for (int i = 0; i < D.dim(); ++i)
        d(i) = std::uniform_real_distribution<double>(lo(i), hi(i))(rng);
      if (D.contains(d, 0.0)) return d;
    }
    return centers_[mode];
  }

 private:
  std::vector<std::vector<Eigen::VectorXd>> vertices_;
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> boxes_;
  std::vector<Eigen::VectorXd> centers_;
};

control::PlantInput fallback_input(const sys::SwitchedSystem& plant,
                                   double eps) {
  if (plant.finite()) return 0;
  return geom::chebyshev_center(plant.aff().U, geom::Tol{eps}).first;
}

control::PlantState advance(const sys::SwitchedSystem& plant, int mode,
                            const control::PlantState& x,
                            const control::PlantInput& u,
                            const DisturbanceSampler* sampler,
                            std::mt19937_64& rng) {
  if (plant.finite()) {
    const auto& succ =
        plant.fin().modes[mode].transitions[std::get<int>(x)][std::get<int>(u)];
    std::uniform_int_distribution<std::size_t> pick(0, succ.size() - 1);
    return succ[pick(rng)];
  }
  const auto& md = plant.aff().modes[mode];
  const Eigen::VectorXd d = sampler->sample(plant.aff(), mode, rng);
  const Eigen::VectorXd& xv = std::get<Eigen::VectorXd>(x);
  const Eigen::VectorXd& uv = std::get<Eigen::VectorXd>(u);
  return Eigen::VectorXd(md.A * xv + md.B * uv + md.E * d + md.K);
}

}  // namespace

RunTrace run_schedule(const control::Controller& ctrl,
                      const control::PlantState& x0, int q0, int horizon,
                      const std::vector<preview::PreviewInput>& schedule,
                      std::mt19937_64& rng, const SimOptions& opts) {
  const sys::SwitchedSystem& plant = ctrl.system();
  std::optional<DisturbanceSampler> sampler;
  if (!plant.finite()) sampler.emplace(plant.aff(), ctrl.eps());

  RunTrace tr;
  control::ControllerState cs = ctrl.initial(q0, x0, opts.allow_unsafe_start);
  control::PlantState x = x0;
  std::size_t next_ann = 0;

  for (int t = 0; t < horizon; ++t) {
    TraceStep step;
    step.time = t;

    // A switch due now lands first; announcements issued now follow. A
    // zero-lead announcement lands its switch within the same instant.
    if (cs.pending && cs.pending->countdown == 0) {
      cs = ctrl.on_switch(cs, cs.pending->dest);
      step.switched = true;
    }
    while (next_ann < schedule.size() && schedule[next_ann].t == t) {
      const preview::PreviewInput& p = schedule[next_ann];
      cs = ctrl.receive_preview(cs, p);
      step.received = p;
      ++next_ann;
      if (cs.pending && cs.pending->countdown == 0) {
        cs = ctrl.on_switch(cs, cs.pending->dest);
        step.switched = true;
      }
    }

    step.mode = cs.mode;
    step.x = x;
    const sys::StateSet& S = ctrl.certificate().safe[cs.mode];
    if (plant.finite()) {
      step.safe = sys::ss_fin(S).contains(std::get<int>(x));
    } else {
      const double mg = sys::ss_pol(S).margin(std::get<Eigen::VectorXd>(x));
      step.margin = mg;
      step.safe = mg >= -ctrl.eps();
      tr.min_margin = std::min(tr.min_margin.value_or(mg), mg);
    }
    tr.violation |= !step.safe;

    try {
      control::StepResult r = ctrl.step(cs, x);
      step.u = std::move(r.u);
      step.target = std::move(r.target);
      cs = std::move(r.next);
    } catch (const InfeasibleStateError& e) {
      tr.infeasible = true;
      if (tr.failure.empty()) tr.failure = e.what();
      if (opts.stop_on_infeasible) {
        tr.steps.push_back(std::move(step));
        return tr;
      }
      step.u = fallback_input(plant, ctrl.eps());
      step.target = "fallback";
      control::ControllerState next = cs;
      next.steps_in_mode += 1;
      if (next.pending) next.pending->countdown -= 1;
      cs = std::move(next);
    }

    x = advance(plant, step.mode, x, step.u, sampler ? &*sampler : nullptr, rng);
    tr.steps.push_back(std::move(step));
  }
  return tr;
}

RunTrace simulate(const control::Controller& ctrl, const control::PlantState& x0,
                  int q0, int horizon, std::uint64_t seed,
                  const SimOptions& opts) {
  std::mt19937_64 rng(seed);
  std::vector<preview::PreviewInput> schedule =
      preview::random_input_sequence(ctrl.automaton(), q0, horizon + 1, rng);
  const preview::SequenceCheck chk =
      preview::validate_input_sequence(ctrl.automaton(), q0, schedule);
  if (!chk.valid)
    throw InvariantError("generated announcement schedule is invalid: " +
                         chk.detail);
  // Issuance times are nondecreasing; announcements at or past the horizon
  // can never be received.
  while (!schedule.empty() && schedule.back().t >= horizon)
    schedule.pop_back();
  return run_schedule(ctrl, x0, q0, horizon, schedule, rng, opts);
}

RunTrace simulate(const sys::SwitchedSystem& system,
                  const preview::PreviewAutomaton& g,
                  const synth::SynthesisCertificate& cert,
                  const control::PlantState& x0, int q0, int horizon,
                  std::uint64_t seed, const SimOptions& opts) {
  control::Controller ctrl(system, g, cert);
  return simulate(ctrl, x0, q0, horizon, seed, opts);
}

namespace {

// Depth-bounded universal game against the environment. Controller counters
// saturate at the holding time, which keeps the memo key space finite without
// changing any controller decision.
class ExhaustiveWalker {
 public:
  ExhaustiveWalker(const control::Controller& ctrl, long long budget)
      : ctrl_(ctrl), budget_(budget) {}

  bool instant(control::ControllerState cs, int x, int r) {
    if (r == 0) return true;
    if (++explored_ > budget_)
      throw Error("exhaustive enumeration budget exceeded");
    if (cs.pending && cs.pending->countdown == 0)
      cs = ctrl_.on_switch(cs, cs.pending->dest);
    saturate(cs);
    const auto key =
        std::make_tuple(r, cs.mode, cs.steps_in_mode,
                        cs.pending ? cs.pending->dest : -1,
                        cs.pending ? cs.pending->countdown : -1, x);
    if (const auto it = memo_.find(key); it != memo_.end()) return it->second;
    const bool ok = env_phase(cs, x, r);
    memo_.emplace(key, ok);
    return ok;
  }

  long long explored() const { return explored_; }

 private:
  void saturate(control::ControllerState& cs) const {
    const auto& hold = ctrl_.automaton().holding[cs.mode];
    const int cap = hold ? *hold : 1;
    cs.steps_in_mode = std::min(cs.steps_in_mode, cap);
  }

  // All environment moves at one instant: stay silent, or announce one edge
  // at its reduced lead (a zero-lead announcement switches immediately and
  // may be followed by a further announcement for the new mode).
  bool env_phase(const control::ControllerState& cs, int x, int r) {
    if (!proceed(cs, x, r)) return false;
    if (cs.pending) return true;
    const preview::PreviewAutomaton& g = ctrl_.automaton();
    for (int ei : g.out_edges(cs.mode)) {
      const preview::Edge& e = g.edges[ei];
      if (cs.steps_in_mode + e.preview.lo < *g.holding[cs.mode]) continue;
      control::ControllerState cs1 =
          ctrl_.receive_preview(cs, {0, e.preview.lo, e.to});
      if (cs1.pending->countdown == 0) {
        if (!env_phase(ctrl_.on_switch(cs1, e.to), x, r)) return false;
      } else if (!proceed(cs1, x, r)) {
        return false;
      }
    }
    return true;
  }

  // Safety at this instant, one controller step, then every plant successor.
  bool proceed(const control::ControllerState& cs, int x, int r) {
    if (!sys::ss_fin(ctrl_.certificate().safe[cs.mode]).contains(x))
      return false;
    control::StepResult sr;
    try {
      sr = ctrl_.step(cs, control::PlantState{x});
    } catch (const InfeasibleStateError&) {
      return false;
    }
    const auto& succ = ctrl_.system().fin().modes[cs.mode]
                           .transitions[x][std::get<int>(sr.u)];
    for (int nx : succ)
      if (!instant(sr.next, nx, r - 1)) return false;
    return true;
  }

  const control::Controller& ctrl_;
  long long budget_;
  long long explored_ = 0;
  std::map<std::tuple<int, int, int, int, int, int>, bool> memo_;
};

}  // namespace

ExhaustiveResult exhaustive_check(const control::Controller& ctrl, int depth,
                                  long long budget) {
  if (!ctrl.system().finite())
    throw Error("exhaustive_check needs the finite backend");
  if (depth < 0) throw Error("depth must be >= 0");
  ExhaustiveWalker walker(ctrl, budget);
  const auto& w = ctrl.certificate().winning.w;
  for (int q = 0; q < ctrl.automaton().num_nodes; ++q) {
    for (int x : sys::ss_fin(w[q]).ids()) {
      if (!walker.instant(ctrl.initial(q, control::PlantState{x}), x, depth))
        return {false, walker.explored()};
    }
  }
  return {true, walker.explored()};
}

}  // namespace presyn::sim
