#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <random>

#include "doctest.h"
#include "presyn/errors.hpp"
#include "presyn/systems/switched_system.hpp"

using namespace presyn;
using namespace presyn::sys;
using geom::Polytope;

namespace {

// Two modes on states {s1,s2,s3} with two inputs; f_1 parks everything at s3
// except s1 (self-loop or hop to s2), f_2 lets s2 oscillate.
SwitchedSystem toy_system() {
  FinitePlant p;
  p.num_states = 3;
  p.num_inputs = 2;
  p.modes.resize(2);
  p.modes[0].transitions = {{{0}, {1}}, {{2}, {2}}, {{2}, {2}}};
  p.modes[1].transitions = {{{2}, {2}}, {{1}, {0}}, {{2}, {2}}};
  return SwitchedSystem(std::move(p));
}

FiniteSet brute_force_pre(const FinitePlant& p, int mode, const FiniteSet& V) {
  FiniteSet out(p.num_states);
  for (int x = 0; x < p.num_states; ++x)
    for (int u = 0; u < p.num_inputs; ++u) {
      bool ok = true;
      for (int nx : p.modes[mode].transitions[x][u]) ok = ok && V.contains(nx);
      if (ok) out.insert(x);
    }
  return out;
}

struct Cruise {
  double a, b, e, k;
  double xlo = 31.95, xhi = 32.0;
  double ulo = -10725.0, uhi = 10890.0;
  // Road-grade disturbance d = g sin(theta) per grade range, g = 10.
  double d1lo = 10.0 * std::sin(-30.5 * M_PI / 180.0);
  double d1hi = 10.0 * std::sin(-29.5 * M_PI / 180.0);
  double d2hi = 10.0 * std::sin(0.5 * M_PI / 180.0);
  Cruise() {
    const double dt = 0.1, m = 1650.0, f0 = 0.1, f1 = 5.0;
    a = 1.0 - dt * f1 / m;
    b = dt / m;
    e = -dt;
    k = -dt * f0 / m;
  }
  std::pair<double, double> dist(int mode) const {
    if (mode == 0) return {d1lo, d1hi};
    if (mode == 1) return {-d2hi, d2hi};
    return {-d1hi, -d1lo};
  }
};

SwitchedSystem cruise_system(const Cruise& c) {
  AffinePlant p;
  p.X = Polytope::interval(c.xlo, c.xhi);
  p.U = Polytope::interval(c.ulo, c.uhi);
  for (int m = 0; m < 3; ++m) {
    AffineMode md{Eigen::MatrixXd::Constant(1, 1, c.a),
                  Eigen::MatrixXd::Constant(1, 1, c.b),
                  Eigen::MatrixXd::Constant(1, 1, c.e),
                  Eigen::VectorXd::Constant(1, c.k),
                  Polytope::interval(c.dist(m).first, c.dist(m).second)};
    p.modes.push_back(std::move(md));
  }
  return SwitchedSystem(std::move(p));
}

// Closed-form 1D predecessor for x+ = a x + b u + k + e d with a, b > 0:
// the u-sweep of the robust target is an interval, clipped to the domain.
std::optional<std::pair<double, double>> pre_1d(
    const Cruise& c, std::pair<double, double> d,
    std::pair<double, double> v) {
  const double wlo = std::min(c.e * d.first, c.e * d.second);
  const double whi = std::max(c.e * d.first, c.e * d.second);
  const double L = v.first - wlo, H = v.second - whi;
  if (L > H) return std::nullopt;
  double lo = (L - c.b * c.uhi - c.k) / c.a;
  double hi = (H - c.b * c.ulo - c.k) / c.a;
  lo = std::max(lo, c.xlo);
  hi = std::min(hi, c.xhi);
  if (lo > hi) return std::nullopt;
  return std::make_pair(lo, hi);
}

std::optional<std::pair<double, double>> inv_1d(const Cruise& c,
                                                std::pair<double, double> d) {
  std::optional<std::pair<double, double>> v{{c.xlo, c.xhi}};
  for (int i = 0; i < 100000; ++i) {
    auto next = pre_1d(c, d, *v);
    if (!next) return std::nullopt;
    if (std::abs(next->first - v->first) < 1e-12 &&
        std::abs(next->second - v->second) < 1e-12)
      return next;
    v = next;
  }
  return v;
}

std::pair<double, double> interval_of(const Polytope& p) {
  auto [lo, hi] = geom::bounding_box(p);
  return {lo(0), hi(0)};
}

}  // namespace

TEST_CASE("finite pre matches exhaustive enumeration on the toy system") {
  SwitchedSystem sys = toy_system();

  StateSet v1 = FiniteSet::of(3, {0});
  CHECK(ss_fin(pre(sys, 0, v1)) == FiniteSet::of(3, {0}));

  for (int mode = 0; mode < 2; ++mode)
    for (int bits = 0; bits < 8; ++bits) {
      FiniteSet v(3);
      for (int i = 0; i < 3; ++i)
        if (bits & (1 << i)) v.insert(i);
      CHECK(ss_fin(pre(sys, mode, v)) == brute_force_pre(sys.fin(), mode, v));
    }
}

TEST_CASE("pre_int clips to the safe set") {
  SwitchedSystem sys = toy_system();
  StateSet s12 = FiniteSet::of(3, {0, 1});

  CHECK(ss_fin(pre_int(sys, 0, FiniteSet::of(3, {1}), s12)) ==
        FiniteSet::of(3, {0}));
  CHECK(ss_is_empty(pre_int(sys, 0, FiniteSet(3), s12)));
  CHECK(ss_is_empty(pre_int(sys, 0, s12, FiniteSet(3))));

  // Membership in S regardless of the target.
  for (int bits = 0; bits < 8; ++bits) {
    FiniteSet v(3);
    for (int i = 0; i < 3; ++i)
      if (bits & (1 << i)) v.insert(i);
    CHECK(ss_fin(pre_int(sys, 1, v, s12)).is_subset_of(ss_fin(s12)));
  }
}

TEST_CASE("inv finds the toy fixed point and detects already-invariant sets") {
  SwitchedSystem sys = toy_system();
  StateSet s12 = FiniteSet::of(3, {0, 1});

  InvResult r = inv(sys, 0, s12);
  CHECK(r.status == FixpointStatus::Converged);
  CHECK(ss_fin(r.set) == FiniteSet::of(3, {0}));
  CHECK(ss_equal(pre_int(sys, 0, r.set, s12), r.set, 0.0));

  // {s1} is invariant under f_1 already: one sweep settles it.
  InvResult r2 = inv(sys, 0, FiniteSet::of(3, {0}));
  CHECK(r2.status == FixpointStatus::Converged);
  CHECK(r2.iterations == 1);
  CHECK(ss_fin(r2.set) == FiniteSet::of(3, {0}));
}

TEST_CASE("affine pre agrees with the closed-form 1D cruise oracle") {
  Cruise c;
  SwitchedSystem sys = cruise_system(c);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pick(c.xlo, c.xhi);

  for (int mode = 0; mode < 3; ++mode) {
    StateSet full = sys.full_domain();
    StateSet pf = pre(sys, mode, full);
    auto want = pre_1d(c, c.dist(mode), {c.xlo, c.xhi});
    REQUIRE(want.has_value());
    auto got = interval_of(ss_pol(pf));
    CHECK(got.first == doctest::Approx(want->first).epsilon(1e-9));
    CHECK(got.second == doctest::Approx(want->second).epsilon(1e-9));

    for (int trial = 0; trial < 20; ++trial) {
      double p1 = pick(rng), p2 = pick(rng);
      if (p1 > p2) std::swap(p1, p2);
      StateSet v = Polytope::interval(p1, p2);
      StateSet pv = pre(sys, mode, v);
      auto w = pre_1d(c, c.dist(mode), {p1, p2});
      if (!w) {
        CHECK(ss_is_empty(pv));
      } else {
        REQUIRE(!ss_is_empty(pv));
        auto g = interval_of(ss_pol(pv));
        CHECK(g.first == doctest::Approx(w->first).epsilon(1e-9));
        CHECK(g.second == doctest::Approx(w->second).epsilon(1e-9));
      }
    }
  }

  // Mild disturbance mode: the whole speed band is recoverable in one step.
  StateSet band = Polytope::interval(c.xlo, c.xhi);
  CHECK(geom::is_subset(ss_pol(band), ss_pol(pre(sys, 1, band)), 1e-9));
}

TEST_CASE("per-grade cruise invariant sets fill the whole speed band") {
  Cruise c;
  SwitchedSystem sys = cruise_system(c);
  for (int mode = 0; mode < 3; ++mode) {
    InvResult r = inv(sys, mode, sys.full_domain());
    CHECK(r.status == FixpointStatus::Converged);
    CHECK(ss_equal(r.set, sys.full_domain(), 1e-6));
    auto want = inv_1d(c, c.dist(mode));
    REQUIRE(want.has_value());
    auto got = interval_of(ss_pol(r.set));
    CHECK(got.first == doctest::Approx(want->first).epsilon(1e-8));
    CHECK(got.second == doctest::Approx(want->second).epsilon(1e-8));
  }
}

TEST_CASE("hull disturbance empties the cruise invariant set") {
  Cruise c;
  AffinePlant p;
  p.X = Polytope::interval(c.xlo, c.xhi);
  p.U = Polytope::interval(c.ulo, c.uhi);
  p.modes.push_back(AffineMode{Eigen::MatrixXd::Constant(1, 1, c.a),
                               Eigen::MatrixXd::Constant(1, 1, c.b),
                               Eigen::MatrixXd::Constant(1, 1, c.e),
                               Eigen::VectorXd::Constant(1, c.k),
                               Polytope::interval(c.d1lo, -c.d1lo)});
  SwitchedSystem sys(std::move(p));
  InvResult r = inv(sys, 0, sys.full_domain());
  CHECK(r.status == FixpointStatus::Converged);
  CHECK(ss_is_empty(r.set));

  auto want = inv_1d(c, {c.d1lo, -c.d1lo});
  CHECK(!want.has_value());
}

TEST_CASE("gridded abstraction under-approximates the affine invariant set") {
  Cruise c;
  SwitchedSystem aff = cruise_system(c);
  InvResult affine_w = inv(aff, 1, aff.full_domain());
  REQUIRE(affine_w.status == FixpointStatus::Converged);

  // Cells 0..N-1 tile X; cell N is the out-of-domain trap. Interval images
  // over-approximate the true successors, so abstraction wins are sound.
  const int N = 40, M = 101;
  const double h = (c.xhi - c.xlo) / N;
  auto d = c.dist(1);
  FinitePlant fp;
  fp.num_states = N + 1;
  fp.num_inputs = M;
  fp.modes.resize(1);
  auto& tr = fp.modes[0].transitions;
  tr.assign(N + 1, std::vector<std::vector<int>>(M));
  const double wlo = std::min(c.e * d.first, c.e * d.second);
  const double whi = std::max(c.e * d.first, c.e * d.second);
  for (int cell = 0; cell < N; ++cell) {
    const double lo = c.xlo + cell * h, hi = lo + h;
    for (int ui = 0; ui < M; ++ui) {
      const double u = c.ulo + (c.uhi - c.ulo) * ui / (M - 1);
      const double ylo = c.a * lo + c.b * u + c.k + wlo;
      const double yhi = c.a * hi + c.b * u + c.k + whi;
      for (int t = 0; t < N; ++t) {
        const double tlo = c.xlo + t * h, thi = tlo + h;
        if (ylo <= thi && yhi >= tlo) tr[cell][ui].push_back(t);
      }
      if (ylo < c.xlo || yhi > c.xhi) tr[cell][ui].push_back(N);
      REQUIRE(!tr[cell][ui].empty());
    }
  }
  for (int ui = 0; ui < M; ++ui) tr[N][ui] = {N};
  SwitchedSystem fin(std::move(fp));

  FiniteSet safe = FiniteSet::full(N + 1);
  safe.erase(N);
  InvResult finite_w = inv(fin, 0, safe);
  CHECK(finite_w.status == FixpointStatus::Converged);
  CHECK(!ss_is_empty(finite_w.set));
  for (int cell : ss_fin(finite_w.set).ids()) {
    Eigen::VectorXd center = Eigen::VectorXd::Constant(1, c.xlo + (cell + 0.5) * h);
    CHECK(ss_pol(affine_w.set).contains(center, 1e-6));
  }
}

TEST_CASE("pre is monotone in the target") {
  SwitchedSystem toy = toy_system();
  for (int mode = 0; mode < 2; ++mode)
    for (int b1 = 0; b1 < 8; ++b1)
      for (int b2 = 0; b2 < 8; ++b2) {
        if ((b1 & b2) != b1) continue;
        FiniteSet v1(3), v2(3);
        for (int i = 0; i < 3; ++i) {
          if (b1 & (1 << i)) v1.insert(i);
          if (b2 & (1 << i)) v2.insert(i);
        }
        CHECK(ss_fin(pre(toy, mode, v1))
                  .is_subset_of(ss_fin(pre(toy, mode, v2))));
      }

  Cruise c;
  SwitchedSystem aff = cruise_system(c);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pick(c.xlo, c.xhi);
  for (int trial = 0; trial < 25; ++trial) {
    double p1 = pick(rng), p2 = pick(rng);
    if (p1 > p2) std::swap(p1, p2);
    double q1 = p1 - 0.2 * (pick(rng) - c.xlo), q2 = p2 + 0.01;
    StateSet inner = Polytope::interval(p1, p2);
    StateSet outer = Polytope::interval(q1, q2);
    int mode = static_cast<int>(trial % 3);
    CHECK(ss_is_subset(pre(aff, mode, inner), pre(aff, mode, outer), 1e-7));
  }
}

TEST_CASE("slow uncontrollable drift hits the iteration cap") {
  AffinePlant p;
  p.X = Polytope::interval(0.0, 1.0);
  p.U = Polytope::interval(0.0, 0.0);
  p.modes.push_back(AffineMode{Eigen::MatrixXd::Constant(1, 1, 1.0),
                               Eigen::MatrixXd::Zero(1, 1),
                               Eigen::MatrixXd::Zero(1, 1),
                               Eigen::VectorXd::Constant(1, -0.001),
                               Polytope::interval(0.0, 0.0)});
  SwitchedSystem sys(std::move(p));

  FixpointOptions tight;
  tight.max_iters = 50;
  InvResult capped = inv(sys, 0, sys.full_domain(), tight);
  CHECK(capped.status == FixpointStatus::IterationCapped);
  CHECK(capped.iterations == 50);
  CHECK(!ss_is_empty(capped.set));
  CHECK(ss_is_subset(capped.set, sys.full_domain(), 1e-9));

  FixpointOptions roomy;
  roomy.max_iters = 2000;
  InvResult done = inv(sys, 0, sys.full_domain(), roomy);
  CHECK(done.status == FixpointStatus::Converged);
  CHECK(ss_is_empty(done.set));
}

TEST_CASE("malformed plants and backend mismatches are rejected") {
  FinitePlant dead;
  dead.num_states = 2;
  dead.num_inputs = 1;
  dead.modes.resize(1);
  dead.modes[0].transitions = {{{1}}, {{}}};
  CHECK_THROWS_AS(SwitchedSystem(std::move(dead)), SpecError);

  AffinePlant bad;
  bad.X = Polytope::interval(0.0, 1.0);
  bad.U = Polytope::interval(0.0, 1.0);
  bad.modes.push_back(AffineMode{Eigen::MatrixXd::Identity(1, 1),
                                 Eigen::MatrixXd::Zero(1, 2),
                                 Eigen::MatrixXd::Zero(1, 1),
                                 Eigen::VectorXd::Zero(1),
                                 Polytope::interval(0.0, 0.0)});
  CHECK_THROWS_AS(SwitchedSystem(std::move(bad)), DimensionError);

  AffinePlant noD;
  noD.X = Polytope::interval(0.0, 1.0);
  noD.U = Polytope::interval(0.0, 1.0);
  noD.modes.push_back(AffineMode{Eigen::MatrixXd::Identity(1, 1),
                                 Eigen::MatrixXd::Zero(1, 1),
                                 Eigen::MatrixXd::Zero(1, 1),
                                 Eigen::VectorXd::Zero(1),
                                 Polytope::empty(1)});
  CHECK_THROWS_AS(SwitchedSystem(std::move(noD)), SpecError);

  SwitchedSystem toy = toy_system();
  CHECK_THROWS_AS(pre(toy, 0, StateSet(Polytope::interval(0, 1))),
                  DimensionError);
  CHECK_THROWS_AS(pre(toy, 0, StateSet(FiniteSet(4))), DimensionError);
  CHECK_THROWS_AS(pre(toy, 5, StateSet(FiniteSet(3))), Error);
}
