#include "presyn/io/spec_file.hpp"

#include <fstream>
#include <optional>
#include <unsupported/Eigen/MatrixFunctions>
#include <utility>

#include "presyn/errors.hpp"

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

sys::FinitePlant finite_plant_from_json(const json& j, const std::string& ctx) {
  sys::FinitePlant p;
  if (!member(j, "num_states", ctx).is_number_integer() ||
      !member(j, "num_inputs", ctx).is_number_integer())
    fail(ctx, "num_states and num_inputs must be integers");
  p.num_states = j["num_states"].get<int>();
  p.num_inputs = j["num_inputs"].get<int>();
  const json& modes = member(j, "modes", ctx);
  if (!modes.is_array() || modes.empty())
    fail(ctx + ".modes", "expected a non-empty array");
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const std::string mctx = ctx + ".modes[" + std::to_string(m) + "]";
    const json& tj = member(modes[m], "transitions", mctx);
    if (!tj.is_array()) fail(mctx + ".transitions", "expected an array");
    sys::FiniteMode mode;
    for (std::size_t x = 0; x < tj.size(); ++x) {
      const json& row = tj[x];
      const std::string xctx =
          mctx + ".transitions[" + std::to_string(x) + "]";
      if (!row.is_array()) fail(xctx, "expected an array per state");
      std::vector<std::vector<int>> cols;
      for (std::size_t u = 0; u < row.size(); ++u) {
        const json& cell = row[u];
        const std::string uctx = xctx + "[" + std::to_string(u) + "]";
        if (!cell.is_array()) fail(uctx, "expected a successor list");
        std::vector<int> succ;
        for (std::size_t s = 0; s < cell.size(); ++s) {
          if (!cell[s].is_number_integer())
            fail(uctx + "[" + std::to_string(s) + "]", "expected a state id");
          const int id = cell[s].get<int>();
          if (id < 1 || id > p.num_states)
            fail(uctx + "[" + std::to_string(s) + "]",
                 "state id " + std::to_string(id) + " outside 1.." +
                     std::to_string(p.num_states));
          succ.push_back(id - 1);
        }
        cols.push_back(std::move(succ));
      }
      mode.transitions.push_back(std::move(cols));
    }
    p.modes.push_back(std::move(mode));
  }
  return p;
}

// Exact discretization under piecewise-constant input and disturbance: one
// matrix exponential of the dynamics augmented with [B E K] columns.
void discretize_zoh(Eigen::MatrixXd& A, Eigen::MatrixXd& B, Eigen::MatrixXd& E,
                    Eigen::VectorXd& K, double dt) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  const int dd = static_cast<int>(E.cols());
  const int w = m + dd + 1;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + w, n + w);
  M.topLeftCorner(n, n) = A;
  M.block(0, n, n, m) = B;
  M.block(0, n + m, n, dd) = E;
  M.col(n + m + dd).head(n) = K;
  const Eigen::MatrixXd X = (M * dt).exp();
  A = X.topLeftCorner(n, n);
  B = X.block(0, n, n, m);
  E = X.block(0, n + m, n, dd);
  K = X.col(n + m + dd).head(n);
}

void discretize_euler(Eigen::MatrixXd& A, Eigen::MatrixXd& B,
                      Eigen::MatrixXd& E, Eigen::VectorXd& K, double dt) {
  A = Eigen::MatrixXd::Identity(A.rows(), A.cols()) + dt * A;
  B *= dt;
  E *= dt;
  K *= dt;
}

sys::AffinePlant affine_plant_from_json(const json& j, const Options& opts,
                                        const std::string& ctx) {
  sys::AffinePlant p;
  p.X = polytope_from_json(member(j, "X", ctx), ctx + ".X");
  p.U = polytope_from_json(member(j, "U", ctx), ctx + ".U");
  const int n = p.X.dim();

  bool continuous = false;
  double dt = 0.0;
  if (j.contains("continuous")) {
    if (!j["continuous"].is_boolean())
      fail(ctx + ".continuous", "expected a boolean");
    continuous = j["continuous"].get<bool>();
  }
  if (continuous) {
    const json& ts = member(j, "time_step", ctx);
    if (!ts.is_number() || ts.get<double>() <= 0.0)
      fail(ctx + ".time_step", "expected a positive number");
    dt = ts.get<double>();
    if (opts.discretization != "euler" && opts.discretization != "zoh")
      fail(ctx, "unknown discretization '" + opts.discretization + "'");
  }

  const json& modes = member(j, "modes", ctx);
  if (!modes.is_array() || modes.empty())
    fail(ctx + ".modes", "expected a non-empty array");
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const std::string mctx = ctx + ".modes[" + std::to_string(m) + "]";
    const json& mj = modes[m];
    sys::AffineMode mode;
    mode.A = matrix_from_json(member(mj, "A", mctx), mctx + ".A");
    mode.B = matrix_from_json(member(mj, "B", mctx), mctx + ".B");
    if (mj.contains("K"))
      mode.K = vector_from_json(mj["K"], mctx + ".K");
    else
      mode.K = Eigen::VectorXd::Zero(n);
    const bool has_e = mj.contains("E");
    const bool has_d = mj.contains("D");
    if (has_e != has_d) fail(mctx, "E and D must be given together");
    if (has_e) {
      mode.E = matrix_from_json(mj["E"], mctx + ".E");
      mode.D = polytope_from_json(mj["D"], mctx + ".D");
    } else {
      mode.E = Eigen::MatrixXd::Zero(n, 1);
      mode.D = geom::Polytope::interval(0.0, 0.0);
    }
    if (continuous) {
      if (opts.discretization == "zoh")
        discretize_zoh(mode.A, mode.B, mode.E, mode.K, dt);
      else
        discretize_euler(mode.A, mode.B, mode.E, mode.K, dt);
    }
    p.modes.push_back(std::move(mode));
  }
  return p;
}

}  // namespace

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError(path + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SpecError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw SpecError(path + ": cannot open file for writing");
  out << j.dump(2) << "\n";
}

SpecFile spec_from_json(const json& j, const std::string& ctx) {
  if (!j.is_object()) fail(ctx, "expected an object");

  Options opts;
  if (j.contains("options")) {
    const json& oj = j["options"];
    const std::string octx = ctx + ".options";
    if (!oj.is_object()) fail(octx, "expected an object");
    if (oj.contains("tol")) {
      if (!oj["tol"].is_number() || oj["tol"].get<double>() <= 0.0)
        fail(octx + ".tol", "expected a positive number");
      opts.tol = oj["tol"].get<double>();
    }
    if (oj.contains("max_iters")) {
      if (!oj["max_iters"].is_number_integer() ||
          oj["max_iters"].get<int>() < 0)
        fail(octx + ".max_iters", "expected a non-negative integer");
      opts.max_iters = oj["max_iters"].get<int>();
    }
    if (oj.contains("seed")) {
      if (!oj["seed"].is_number_unsigned())
        fail(octx + ".seed", "expected an unsigned integer");
      opts.seed = oj["seed"].get<std::uint64_t>();
    }
    if (oj.contains("discretization")) {
      if (!oj["discretization"].is_string())
        fail(octx + ".discretization", "expected a string");
      opts.discretization = oj["discretization"].get<std::string>();
      if (opts.discretization != "euler" && opts.discretization != "zoh")
        fail(octx + ".discretization",
             "unknown discretization '" + opts.discretization + "'");
    }
  }

  preview::PreviewAutomaton g =
      automaton_from_json(member(j, "automaton", ctx), ctx + ".automaton");
  const auto violations = preview::validate_automaton(g);
  if (!violations.empty())
    fail(ctx + ".automaton",
         violations.front().rule + ": " + violations.front().detail);

  const json& sj = member(j, "system", ctx);
  const std::string sctx = ctx + ".system";
  const json& bj = member(sj, "backend", sctx);
  if (!bj.is_string()) fail(sctx + ".backend", "expected a string");
  const std::string backend = bj.get<std::string>();
  if (backend != "finite" && backend != "affine")
    fail(sctx + ".backend", "unknown backend '" + backend + "'");

  std::optional<sys::SwitchedSystem> system;
  try {
    if (backend == "finite")
      system.emplace(finite_plant_from_json(sj, sctx));
    else
      system.emplace(affine_plant_from_json(sj, opts, sctx));
  } catch (const SpecError&) {
    throw;
  } catch (const Error& e) {
    fail(sctx, e.what());
  }

  if (system->num_modes() != g.num_nodes)
    fail(sctx, "system has " + std::to_string(system->num_modes()) +
                   " modes but the automaton has " +
                   std::to_string(g.num_nodes) + " nodes");

  const json& safj = member(j, "safety", ctx);
  if (!safj.is_array() || static_cast<int>(safj.size()) != g.num_nodes)
    fail(ctx + ".safety", "expected one set per automaton node (" +
                              std::to_string(g.num_nodes) + ")");
  const bool finite = system->finite();
  const int universe =
      finite ? system->fin().num_states : system->aff().X.dim();
  std::vector<sys::StateSet> safety;
  for (int i = 0; i < g.num_nodes; ++i) {
    const std::string ectx = ctx + ".safety[" + std::to_string(i) + "]";
    sys::StateSet s = state_set_from_json(safj[i], finite, universe, ectx);
    try {
      system->check_backend(s);
    } catch (const SpecError&) {
      throw;
    } catch (const Error& e) {
      fail(ectx, e.what());
    }
    safety.push_back(std::move(s));
  }

  return SpecFile{std::move(*system), std::move(g), std::move(safety), opts};
}

SpecFile load_spec(const std::string& path) {
  return spec_from_json(read_json_file(path), path);
}

}  // namespace presyn::io
