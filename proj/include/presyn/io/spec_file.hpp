#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "presyn/io/json_io.hpp"
#include "presyn/systems/switched_system.hpp"

namespace presyn::io {

struct Options {
  double tol = 1e-7;
  int max_iters = 500;
  std::uint64_t seed = 0;
  std::string discretization = "euler";  // "euler" or "zoh"
};

/// A fully validated problem instance: discretized plant, preview automaton,
/// and one safety set per node, with node, mode, and safety indices aligned.
struct SpecFile {
  sys::SwitchedSystem system;
  preview::PreviewAutomaton automaton;
  std::vector<sys::StateSet> safety;
  Options options;
};

/// Parses and validates a problem instance. Continuous affine systems
/// (system.continuous = true with time_step) are discretized here according
/// to options.discretization; modes without a disturbance get the point
/// disturbance D = {0}. Throws SpecError with field context on any problem.
SpecFile spec_from_json(const json& j, const std::string& ctx);

/// Reads, parses, and validates a spec file from disk.
SpecFile load_spec(const std::string& path);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace presyn::io
