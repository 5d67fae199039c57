#include "presyn/cli/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <utility>

#include "presyn/control/controller.hpp"
#include "presyn/errors.hpp"
#include "presyn/geometry/vertex_enum.hpp"
#include "presyn/io/json_io.hpp"
#include "presyn/io/spec_file.hpp"
#include "presyn/sim/simulator.hpp"
#include "presyn/synthesis/winning.hpp"

namespace presyn::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

io::SpecFile load_with_overrides(const std::string& path, const Overrides& ov) {
  json j = io::read_json_file(path);
  if (!j.is_object()) throw SpecError(path + ": expected an object");
  if (ov.tol || ov.max_iters || ov.seed || ov.discretization) {
    json& opts = j["options"];
    if (opts.is_null()) opts = json::object();
    if (ov.tol) opts["tol"] = *ov.tol;
    if (ov.max_iters) opts["max_iters"] = *ov.max_iters;
    if (ov.seed) opts["seed"] = *ov.seed;
    if (ov.discretization) opts["discretization"] = *ov.discretization;
  }
  return io::spec_from_json(j, path);
}

sys::FixpointOptions fixpoint_options(const io::SpecFile& spec) {
  return {spec.options.tol, spec.options.max_iters};
}

const char* status_name(sys::FixpointStatus s) {
  return s == sys::FixpointStatus::Converged ? "converged" : "iteration_capped";
}

json winning_artifact(const io::SpecFile& spec,
                      const synth::SynthesisCertificate& cert) {
  json sets = json::array();
  for (const auto& w : cert.winning.w) sets.push_back(io::to_json(w));
  const int universe = spec.system.finite() ? spec.system.fin().num_states
                                            : spec.system.aff().X.dim();
  return {{"backend", spec.system.finite() ? "finite" : "affine"},
          {"universe", universe},
          {"status", status_name(cert.winning.status)},
          {"iterations", cert.winning.iterations},
          {"sets", std::move(sets)}};
}

/// Uniform-ish point of a nonempty set: id draw on the finite backend,
/// bounding-box rejection with a Chebyshev-center fallback on the affine one.
control::PlantState sample_state(const sys::StateSet& set, double eps,
                                 std::mt19937_64& rng) {
  if (sys::ss_is_finite(set)) {
    const std::vector<int> ids = sys::ss_fin(set).ids();
    std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
    return ids[pick(rng)];
  }
  const geom::Polytope& p = sys::ss_pol(set);
  const geom::Tol tol{eps};
  const auto [lo, hi] = geom::bounding_box(p, tol);
  for (int attempt = 0; attempt < 200; ++attempt) {
    Eigen::VectorXd x(p.dim());
    for (int i = 0; i < p.dim(); ++i)
      x(i) = std::uniform_real_distribution<double>(lo(i), hi(i))(rng);
    if (p.contains(x, tol.eps)) return x;
  }
  return geom::chebyshev_center(p, tol).first;
}

[[noreturn]] void bad_export(const std::string& msg) { throw SpecError(msg); }

}  // namespace

int cmd_validate(const std::string& spec_path, const Overrides& ov,
                 std::ostream& out) {
  try {
    const io::SpecFile spec = load_with_overrides(spec_path, ov);
    out << "backend: " << (spec.system.finite() ? "finite" : "affine") << "\n";
    out << "modes: " << spec.system.num_modes() << "\n";
    out << "automaton nodes: " << spec.automaton.num_nodes
        << ", edges: " << spec.automaton.edges.size() << "\n";
    for (int q = 0; q < spec.automaton.num_nodes; ++q)
      out << "safety[" << q + 1
          << "]: " << io::set_metrics(spec.safety[q], spec.options.tol).dump()
          << "\n";
    out << "spec OK\n";
    return kExitOk;
  } catch (const Error& e) {
    out << "error: " << e.what() << "\n";
    return kExitSpecError;
  }
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir,
              const Overrides& ov, std::ostream& out) {
  try {
    const io::SpecFile spec = load_with_overrides(spec_path, ov);
    const auto t0 = std::chrono::steady_clock::now();
    const synth::SynthesisCertificate cert =
        synth::con_inv(spec.system, spec.automaton, spec.safety,
                       fixpoint_options(spec));
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    fs::create_directories(out_dir);
    io::write_json_file((fs::path(out_dir) / "winning.json").string(),
                        winning_artifact(spec, cert));
    io::write_json_file((fs::path(out_dir) / "certificate.json").string(),
                        io::to_json(cert));
    json nodes = json::array();
    for (int q = 0; q < spec.automaton.num_nodes; ++q)
      nodes.push_back(
          {{"node", q + 1},
           {"metrics", io::set_metrics(cert.winning.w[q], spec.options.tol)}});
    const json summary = {{"status", status_name(cert.winning.status)},
                          {"iterations", cert.winning.iterations},
                          {"wall_time_s", wall},
                          {"tol", spec.options.tol},
                          {"max_iters", spec.options.max_iters},
                          {"nodes", std::move(nodes)}};
    io::write_json_file((fs::path(out_dir) / "summary.json").string(),
                        summary);

    out << "status: " << status_name(cert.winning.status)
        << ", iterations: " << cert.winning.iterations << ", wall: " << wall
        << " s\n";
    for (const auto& nj : summary["nodes"])
      out << "W[" << nj["node"] << "]: " << nj["metrics"].dump() << "\n";
    if (cert.winning.status != sys::FixpointStatus::Converged) {
      out << "not certified: iteration cap hit; artifacts are "
             "over-approximations\n";
      return kExitNotCertified;
    }
    return kExitOk;
  } catch (const Error& e) {
    out << "error: " << e.what() << "\n";
    return kExitSpecError;
  }
}

int cmd_compare(const std::string& spec_path, const Overrides& ov,
                std::ostream& out) {
  try {
    const io::SpecFile spec = load_with_overrides(spec_path, ov);
    const auto opts = fixpoint_options(spec);
    const synth::SynthesisCertificate cert =
        synth::con_inv(spec.system, spec.automaton, spec.safety, opts);

    sys::StateSet hull = spec.safety[0];
    for (std::size_t q = 1; q < spec.safety.size(); ++q)
      hull = sys::ss_intersect(hull, spec.safety[q], {spec.options.tol});
    const sys::SwitchedSystem merged = synth::merge_modes(spec.system);
    const sys::InvResult baseline =
        synth::max_controlled_invariant(merged, hull, opts);

    const double eps = spec.options.tol;
    bool all_contained = true;
    out << "baseline (no preview): "
        << (sys::ss_is_empty(baseline.set, {eps}) ? "empty" : "nonempty")
        << "\n";
    for (int q = 0; q < spec.automaton.num_nodes; ++q) {
      const bool contained =
          sys::ss_is_subset(baseline.set, cert.winning.w[q], eps);
      all_contained &= contained;
      out << "node " << q + 1 << ": winning "
          << (sys::ss_is_empty(cert.winning.w[q], {eps}) ? "empty"
                                                         : "nonempty")
          << ", baseline within winning: " << (contained ? "yes" : "no")
          << "\n";
    }
    if (cert.winning.status != sys::FixpointStatus::Converged ||
        baseline.status != sys::FixpointStatus::Converged) {
      out << "not certified: iteration cap hit\n";
      return kExitNotCertified;
    }
    out << (all_contained ? "containment holds\n" : "containment FAILED\n");
    return all_contained ? kExitOk : kExitViolation;
  } catch (const Error& e) {
    out << "error: " << e.what() << "\n";
    return kExitSpecError;
  }
}

int cmd_simulate(const std::string& spec_path, const std::string& cert_dir,
                 const SimulateArgs& args, const Overrides& ov,
                 std::ostream& out) {
  try {
    const io::SpecFile spec = load_with_overrides(spec_path, ov);
    const bool finite = spec.system.finite();
    const int universe =
        finite ? spec.system.fin().num_states : spec.system.aff().X.dim();
    const std::string cert_path =
        (fs::path(cert_dir) / "certificate.json").string();
    synth::SynthesisCertificate cert = io::certificate_from_json(
        io::read_json_file(cert_path), finite, universe, cert_path);
    const control::Controller ctrl(spec.system, spec.automaton,
                                   std::move(cert), spec.options.tol);

    const double eps = spec.options.tol;
    const auto& starts =
        args.allow_unsafe_start ? ctrl.certificate().safe
                                : ctrl.certificate().winning.w;
    std::vector<int> candidates;
    for (int q = 0; q < spec.automaton.num_nodes; ++q)
      if (!sys::ss_is_empty(starts[q], {eps})) candidates.push_back(q);

    std::mt19937_64 rng(spec.options.seed);
    sim::SimOptions sopts;
    sopts.allow_unsafe_start = args.allow_unsafe_start;
    sopts.stop_on_infeasible = !args.allow_unsafe_start;

    std::vector<sim::RunTrace> runs;
    std::ofstream traces(fs::path(cert_dir) / "traces.jsonl");
    for (int r = 0; r < args.runs; ++r) {
      if (candidates.empty()) break;
      std::uniform_int_distribution<std::size_t> pick(0,
                                                      candidates.size() - 1);
      const int q0 = candidates[pick(rng)];
      const control::PlantState x0 = sample_state(starts[q0], eps, rng);
      sim::RunTrace tr = sim::simulate(ctrl, x0, q0, args.steps,
                                       spec.options.seed + 1 + r, sopts);
      for (const auto& step : tr.steps) {
        json row = io::to_json(step, finite);
        row["run"] = r;
        traces << row.dump() << "\n";
      }
      runs.push_back(std::move(tr));
    }

    json summary = io::trace_summary(runs);
    summary["steps"] = args.steps;
    summary["seed"] = spec.options.seed;
    io::write_json_file((fs::path(cert_dir) / "simulation.json").string(),
                        summary);
    out << summary.dump() << "\n";
    const int violations = summary["violations"].get<int>();
    return violations > 0 ? kExitViolation : kExitOk;
  } catch (const Error& e) {
    out << "error: " << e.what() << "\n";
    return kExitSpecError;
  }
}

int cmd_export(const std::string& cert_dir, const ExportArgs& args,
               std::ostream& out) {
  try {
    if (args.format != "json" && args.format != "csv")
      bad_export("unknown format '" + args.format + "'");
    const std::string win_path =
        (fs::path(cert_dir) / "winning.json").string();
    const json wj = io::read_json_file(win_path);
    const std::string backend = wj.at("backend").get<std::string>();
    const int universe = wj.at("universe").get<int>();
    const json& sets = wj.at("sets");

    const fs::path out_path =
        fs::path(cert_dir) / (args.format == "json" ? "export.json"
                                                    : "export.csv");
    std::ofstream file(out_path);
    if (!file)
      throw SpecError(out_path.string() + ": cannot open file for writing");

    if (backend == "finite") {
      if (!args.project.empty())
        bad_export("projection applies to the affine backend only");
      if (args.format == "json") {
        json j = {{"backend", "finite"}, {"sets", json::array()}};
        for (std::size_t q = 0; q < sets.size(); ++q) {
          const sys::FiniteSet s = io::finite_set_from_json(
              sets[q], universe, win_path + ".sets[" + std::to_string(q) +
                                     "]");
          json states = json::array();
          for (int id : s.ids()) states.push_back(id + 1);
          j["sets"].push_back({{"node", q + 1},
                               {"empty", s.empty()},
                               {"states", std::move(states)}});
        }
        file << j.dump(2) << "\n";
      } else {
        file << "node,state\n";
        for (std::size_t q = 0; q < sets.size(); ++q) {
          const sys::FiniteSet s = io::finite_set_from_json(
              sets[q], universe, win_path + ".sets[" + std::to_string(q) +
                                     "]");
          for (int id : s.ids()) file << q + 1 << "," << id + 1 << "\n";
          if (s.empty()) file << "# node " << q + 1 << ": empty\n";
        }
      }
      out << "wrote " << out_path.string() << "\n";
      return kExitOk;
    }

    std::vector<geom::Polytope> polys;
    for (std::size_t q = 0; q < sets.size(); ++q)
      polys.push_back(io::polytope_from_json(
          sets[q], win_path + ".sets[" + std::to_string(q) + "]"));

    if (args.project.empty()) {
      if (args.format == "csv")
        bad_export(
            "H-representation export requires json format; pass --project "
            "for csv vertex lists");
      json j = {{"backend", "affine"}, {"sets", json::array()}};
      for (std::size_t q = 0; q < polys.size(); ++q) {
        json pj = io::to_json(polys[q]);
        pj["node"] = q + 1;
        j["sets"].push_back(std::move(pj));
      }
      file << j.dump(2) << "\n";
      out << "wrote " << out_path.string() << "\n";
      return kExitOk;
    }

    if (args.project.size() > 3)
      bad_export("vertex export supports at most three coordinates");
    std::vector<int> keep;
    for (int c : args.project) {
      if (c < 1 || c > universe)
        bad_export("projection coordinate " + std::to_string(c) +
                   " outside 1.." + std::to_string(universe));
      keep.push_back(c - 1);
    }

    json jsets = json::array();
    for (std::size_t q = 0; q < polys.size(); ++q) {
      const geom::Polytope proj = geom::project(polys[q], keep, {});
      json vertices = json::array();
      bool empty = true;
      if (!geom::is_empty(proj, {})) {
        empty = false;
        for (const auto& v : geom::enumerate_vertices(proj, {})) {
          json row = json::array();
          for (int i = 0; i < v.size(); ++i) row.push_back(v(i));
          vertices.push_back(std::move(row));
        }
      }
      jsets.push_back({{"node", q + 1},
                       {"empty", empty},
                       {"vertices", std::move(vertices)}});
    }

    if (args.format == "json") {
      const json j = {{"backend", "affine"},
                      {"dims", args.project},
                      {"sets", std::move(jsets)}};
      file << j.dump(2) << "\n";
    } else {
      file << "node";
      for (int c : args.project) file << ",c" << c;
      file << "\n";
      for (const auto& sj : jsets) {
        for (const auto& v : sj["vertices"]) {
          file << sj["node"].get<int>();
          for (const auto& coord : v) file << "," << coord.get<double>();
          file << "\n";
        }
        if (sj["empty"].get<bool>())
          file << "# node " << sj["node"].get<int>() << ": empty\n";
      }
    }
    out << "wrote " << out_path.string() << "\n";
    return kExitOk;
  } catch (const Error& e) {
    out << "error: " << e.what() << "\n";
    return kExitSpecError;
  }
}

}  // namespace presyn::cli
