#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "presyn/control/controller.hpp"

namespace presyn::sim {

/// One simulated instant. x and the safety flag are sampled after any switch
/// or announcement lands at this instant and before the plant moves, so mode
/// is constant on each execution interval and safe mirrors x in S_mode.
struct TraceStep {
  int time = 0;
  int mode = 0;
  control::PlantState x;
  control::PlantInput u;
  std::string target;
  std::optional<preview::PreviewInput> received;
  std::optional<double> margin;  // affine backend: slack of x in S_mode
  bool switched = false;
  bool safe = true;
};

struct RunTrace {
  std::vector<TraceStep> steps;
  bool violation = false;
  bool infeasible = false;
  std::string failure;  // set when the controller gave up
  std::optional<double> min_margin;
};

struct SimOptions {
  bool allow_unsafe_start = false;
  /// Stop at the first infeasible controller query (default). When false the
  /// run continues on a fallback input so the ensuing violation is visible.
  bool stop_on_infeasible = true;
};

/// Closed loop against a scripted announcement schedule (issuance-ordered,
/// Def.-2-valid); disturbances and successor picks come from rng.
RunTrace run_schedule(const control::Controller& ctrl,
                      const control::PlantState& x0, int q0, int horizon,
                      const std::vector<preview::PreviewInput>& schedule,
                      std::mt19937_64& rng, const SimOptions& opts = {});

/// Closed loop against a seeded random environment: the announcement schedule
/// comes from random_input_sequence on the raw automaton and is revalidated;
/// disturbances mix vertex extremes (probability 1/2) with uniform interior
/// samples. Deterministic per seed.
RunTrace simulate(const control::Controller& ctrl, const control::PlantState& x0,
                  int q0, int horizon, std::uint64_t seed,
                  const SimOptions& opts = {});

/// Convenience shape that builds the controller in place.
RunTrace simulate(const sys::SwitchedSystem& system,
                  const preview::PreviewAutomaton& g,
                  const synth::SynthesisCertificate& cert,
                  const control::PlantState& x0, int q0, int horizon,
                  std::uint64_t seed, const SimOptions& opts = {});

struct ExhaustiveResult {
  bool safe = true;
  long long explored = 0;
};

/// Finite backend only: enumerates every environment behavior to the given
/// depth (announce now or later along each edge at its reduced lead, plus all
/// successor nondeterminism) from every start (q0, x0 in W_q0). Reduced leads
/// cover buffered raw announcements: an early announcement influences the
/// controller only from its reduced activation instant. Throws when the
/// explored-instant budget is exceeded.
ExhaustiveResult exhaustive_check(const control::Controller& ctrl, int depth,
                                  long long budget = 2'000'000);

}  // namespace presyn::sim
