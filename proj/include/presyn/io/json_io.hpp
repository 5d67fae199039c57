#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "presyn/preview/automaton.hpp"
#include "presyn/sim/simulator.hpp"
#include "presyn/synthesis/winning.hpp"
#include "presyn/systems/state_set.hpp"

// JSON codecs. On disk, state ids and node ids are 1-based; in memory they
// are 0-based. Loaders take a context string used to prefix error messages
// with the path of the offending field.
namespace presyn::io {

using nlohmann::json;

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& ctx);
Eigen::VectorXd vector_from_json(const json& j, const std::string& ctx);

json to_json(const geom::Polytope& p);
/// Accepts {"A": [[..]], "b": [..]}, {"box": {"lo": [..], "hi": [..]}}, or
/// {"interval": [lo, hi]}. "dim" is required when A has no rows.
geom::Polytope polytope_from_json(const json& j, const std::string& ctx);

json to_json(const sys::FiniteSet& s);
sys::FiniteSet finite_set_from_json(const json& j, int universe,
                                    const std::string& ctx);

json to_json(const sys::StateSet& s);
sys::StateSet state_set_from_json(const json& j, bool finite, int universe,
                                  const std::string& ctx);

json to_json(const preview::PreviewAutomaton& g);
preview::PreviewAutomaton automaton_from_json(const json& j,
                                              const std::string& ctx);

json to_json(const synth::SynthesisCertificate& cert);
synth::SynthesisCertificate certificate_from_json(const json& j, bool finite,
                                                  int universe,
                                                  const std::string& ctx);

/// One JSON-lines row of a run trace.
json to_json(const sim::TraceStep& step, bool finite);

/// {"runs": N, "violations": V, "infeasible": I, "min_margin": m|null}
json trace_summary(const std::vector<sim::RunTrace>& runs);

/// Set-size metrics for summaries: a count on the finite backend; rows,
/// bounding-box volume, and Chebyshev radius (null when empty or unbounded)
/// on the affine one.
json set_metrics(const sys::StateSet& s, double eps);

}  // namespace presyn::io
