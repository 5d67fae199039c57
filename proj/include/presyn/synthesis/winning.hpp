#pragma once

#include <map>
#include <optional>
#include <vector>

#include "presyn/preview/automaton.hpp"
#include "presyn/systems/switched_system.hpp"

namespace presyn::synth {

/// Intermediate sets of the final sweep for one node, the raw material for
/// control extraction. For a destination j, reach[j][l] is the set from which
/// mode i can be steered into W_j in exactly l steps while staying safe
/// (reach[j][0] = W_j). hold_chain[k], k = t_min..H_i, is the set from which
/// the controller can wait out the announcement-free phase (hold_chain[H_i] =
/// W_i). Sinks carry a single entry hold_chain[0] = W_i and no reach chains.
struct NodeCertificate {
  int node = 0;
  int t_min = 0;
  std::optional<int> hold;
  std::map<int, std::vector<sys::StateSet>> reach;
  std::map<int, sys::StateSet> hold_chain;
};

struct WinningSet {
  std::vector<sys::StateSet> w;
  sys::FixpointStatus status = sys::FixpointStatus::Converged;
  int iterations = 0;  // executed outer sweeps
};

struct SynthesisCertificate {
  preview::PreviewAutomaton reduced;
  std::vector<sys::StateSet> safe;
  WinningSet winning;
  std::vector<NodeCertificate> nodes;
};

struct InvPreResult {
  sys::StateSet set;
  NodeCertificate cert;
  bool capped = false;
};

/// One update of a non-sink node's winning-set estimate: backward reach
/// chains toward every announced destination, an invariance core over their
/// intersection, then the forward hold chain up to the holding time. Requires
/// singleton preview windows. The result never leaves S[node] (checked).
InvPreResult inv_pre(const sys::SwitchedSystem& system,
                     const preview::PreviewAutomaton& g_hat, int node,
                     const std::vector<sys::StateSet>& w,
                     const std::vector<sys::StateSet>& s,
                     const sys::FixpointOptions& opts = {});

/// Maximal winning set computation. Reduces the automaton to preview lower
/// bounds, solves sinks by plain invariance, then sweeps inv_pre over
/// non-sink nodes in ascending id order until nothing changes. On
/// convergence the result is the maximal winning set; a capped inner fixed
/// point or hitting the sweep cap yields status iteration_capped and the
/// result is only an over-approximation (not certified).
SynthesisCertificate con_inv(const sys::SwitchedSystem& system,
                             const preview::PreviewAutomaton& g,
                             const std::vector<sys::StateSet>& s,
                             const sys::FixpointOptions& opts = {});

/// True when the stored winning sets re-verify as a fixed point of the
/// update operators: every sink set equals the plain invariance fixed point
/// of its safe set and every non-sink set is unchanged by one more update.
/// Reloaded artifacts are expected to pass without recomputation drift.
bool verify_fixed_point(const sys::SwitchedSystem& system,
                        const SynthesisCertificate& cert,
                        const sys::FixpointOptions& opts = {});

/// Preview-agnostic baseline: collapses all modes into one whose behavior
/// covers every mode's (union of finite transitions, or common affine
/// dynamics with the bounding box of the disturbance sets).
sys::SwitchedSystem merge_modes(const sys::SwitchedSystem& system);

/// Plain maximal controlled invariant set of a merged single-mode system.
sys::InvResult max_controlled_invariant(const sys::SwitchedSystem& merged,
                                        const sys::StateSet& s_hull,
                                        const sys::FixpointOptions& opts = {});

}  // namespace presyn::synth
