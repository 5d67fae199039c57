#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace presyn::cli {

// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSpecError = 1;
inline constexpr int kExitNotCertified = 2;
inline constexpr int kExitViolation = 3;

/// Command-line values layered over a spec file's options block before
/// validation; absent fields keep the file's (or default) values.
struct Overrides {
  std::optional<double> tol;
  std::optional<int> max_iters;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> discretization;
};

struct SimulateArgs {
  int runs = 20;
  int steps = 100;
  bool allow_unsafe_start = false;
};

struct ExportArgs {
  std::vector<int> project;     // 1-based coordinates; empty = H-rep dump
  std::string format = "json";  // "json" or "csv"
};

/// Loads and fully validates a spec; prints a structural report.
int cmd_validate(const std::string& spec_path, const Overrides& ov,
                 std::ostream& out);

/// Runs the winning-set synthesis and writes winning.json,
/// certificate.json, and summary.json into out_dir.
int cmd_synth(const std::string& spec_path, const std::string& out_dir,
              const Overrides& ov, std::ostream& out);

/// Synthesizes with preview and without (merged modes, hulled disturbance)
/// and reports per-node containment of the baseline in the winning set.
int cmd_compare(const std::string& spec_path, const Overrides& ov,
                std::ostream& out);

/// Seeded closed-loop runs from sampled winning-set starts against the
/// artifacts in cert_dir; writes traces.jsonl and simulation.json there.
int cmd_simulate(const std::string& spec_path, const std::string& cert_dir,
                 const SimulateArgs& args, const Overrides& ov,
                 std::ostream& out);

/// Emits stored winning sets for external plotting: coordinate projections
/// as vertex lists (up to three dimensions), or the raw H-representations.
int cmd_export(const std::string& cert_dir, const ExportArgs& args,
               std::ostream& out);

}  // namespace presyn::cli
