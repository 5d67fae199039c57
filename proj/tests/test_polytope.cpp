#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "doctest.h"
#include "presyn/errors.hpp"
#include "presyn/geometry/polytope.hpp"
#include "presyn/geometry/vertex_enum.hpp"
#include "support/random_polytopes.hpp"

using namespace presyn;
using namespace presyn::geom;
using presyn::testsup::in_hull;
using presyn::testsup::random_bounded_polytope;

namespace {
Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<int>(v.size()));
  int i = 0;
  for (double t : v) x(i++) = t;
  return x;
}
}  // namespace

TEST_CASE("box intersection reduces to the overlap box") {
  const auto p = Polytope::box(vec({0, 0}), vec({2, 2}));
  const auto q = Polytope::box(vec({1, 1}), vec({3, 3}));
  const auto r = intersect(p, q);
  CHECK(r.rows() == 4);
  CHECK(set_equal(r, Polytope::box(vec({1, 1}), vec({2, 2})), 1e-9));
}

TEST_CASE("subset on nested boxes") {
  const auto inner = Polytope::box(vec({0, 0, 0}), vec({1, 1, 1}));
  const auto outer = Polytope::box(vec({0, 0, 0}), vec({2, 2, 2}));
  CHECK(is_subset(inner, outer, 1e-9));
  CHECK_FALSE(is_subset(outer, inner, 1e-9));
}

TEST_CASE("emptiness of contradictory halfspaces") {
  Eigen::MatrixXd A(2, 1);
  A << 1, -1;
  CHECK(is_empty(Polytope(A, vec({-1, 0}))));
  CHECK_FALSE(is_empty(Polytope::interval(0, 1)));
}

TEST_CASE("support of the unit box") {
  const auto p = Polytope::box(vec({-1, -1}), vec({1, 1}));
  const auto out = support(p, vec({1, 1}));
  REQUIRE(out.status == LpStatus::Optimal);
  CHECK(out.value == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(out.point.isApprox(vec({1, 1}), 1e-7));
}

TEST_CASE("support unbounded direction is reported, empty input throws") {
  Eigen::MatrixXd A(1, 1);
  A << -1;
  const auto halfline = Polytope(A, vec({0}));
  CHECK(support(halfline, vec({1})).status == LpStatus::Unbounded);
  CHECK_THROWS_AS(support(Polytope::empty(1), vec({1})), Error);
}

TEST_CASE("projection of the rotated square onto one axis") {
  const double h = std::sqrt(2.0) / 2.0;
  Eigen::MatrixXd A(4, 2);
  A << 1, 1, 1, -1, -1, 1, -1, -1;
  Eigen::VectorXd b = Eigen::VectorXd::Constant(4, h);
  const auto proj = project(Polytope(A, b), {0});
  CHECK(set_equal(proj, Polytope::interval(-h, h), 1e-7));
}

TEST_CASE("projection keeps requested coordinate order") {
  const auto p = Polytope::box(vec({0, -1, 5}), vec({1, 2, 6}));
  const auto proj = project(p, {2, 0});
  const auto expect = Polytope::box(vec({5, 0}), vec({6, 1}));
  CHECK(set_equal(proj, expect, 1e-9));
}

TEST_CASE("redundancy removal strips duplicates and slack rows") {
  Eigen::MatrixXd A(7, 2);
  Eigen::VectorXd b(7);
  A << 1, 0, -1, 0, 0, 1, 0, -1,  // unit box
      2, 0,                       // scaled duplicate of row 0
      1, 1,                       // loose diagonal
      0, 1;                       // exact duplicate of row 2
  b << 1, 0, 1, 0, 2, 5, 1;
  const auto r = remove_redundancy(Polytope(A, b));
  CHECK(r.rows() == 4);
  CHECK(set_equal(r, Polytope::box(vec({0, 0}), vec({1, 1})), 1e-9));
}

TEST_CASE("operations on empty inputs return the canonical empty polytope") {
  const auto e = Polytope::empty(2);
  CHECK(e.is_canonical_empty());
  CHECK(intersect(e, Polytope::box(vec({0, 0}), vec({1, 1})))
            .is_canonical_empty());
  CHECK(project(e, {0}).is_canonical_empty());
  CHECK(remove_redundancy(e).is_canonical_empty());
  // Detected (non-canonical) emptiness also collapses to the canonical form.
  Eigen::MatrixXd A(2, 1);
  A << 1, -1;
  CHECK(remove_redundancy(Polytope(A, vec({-1, 0}))).is_canonical_empty());
  CHECK(is_subset(e, Polytope::box(vec({0, 0}), vec({1, 1})), 1e-9));
  CHECK_FALSE(is_subset(Polytope::box(vec({0, 0}), vec({1, 1})), e, 1e-9));
}

TEST_CASE("nonempty verdicts come with a checkable witness") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 25; ++t) {
    const int dim = 1 + static_cast<int>(rng() % 3);
    const auto p = random_bounded_polytope(rng, dim, 4);
    const auto [ok, x] = feasible_point(p);
    REQUIRE(ok);
    CHECK(p.contains(x, 1e-7));
  }
}

TEST_CASE("chebyshev center sits inside at the reported depth") {
  const auto p = Polytope::box(vec({0, 0}), vec({4, 2}));
  const auto [x, r] = chebyshev_center(p);
  CHECK(r == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(p.contains(x, 1e-9));
  CHECK(p.margin(x) == doctest::Approx(r).epsilon(1e-6));
}

TEST_CASE("support is sublinear on random instances") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    const int dim = 1 + static_cast<int>(rng() % 3);
    const auto p = random_bounded_polytope(rng, dim, 5);
    Eigen::VectorXd c1(dim), c2(dim);
    for (int i = 0; i < dim; ++i) {
      c1(i) = gauss(rng);
      c2(i) = gauss(rng);
    }
    const double s1 = support(p, c1).value;
    const double s2 = support(p, c2).value;
    const double s12 = support(p, c1 + c2).value;
    CHECK(s12 <= s1 + s2 + 2e-7);
  }
}

TEST_CASE("kernel ops agree with the vertex oracle on random low-dim sets") {
  std::mt19937_64 rng(20240818);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Tol tol;
  for (int t = 0; t < 40; ++t) {
    const int dim = 1 + static_cast<int>(rng() % 3);
    const auto p = random_bounded_polytope(rng, dim, 3 + static_cast<int>(rng() % 4));
    const auto verts = enumerate_vertices(p);
    REQUIRE(!verts.empty());

    // Support function equals the vertex maximum.
    for (int s = 0; s < 6; ++s) {
      Eigen::VectorXd c(dim);
      for (int i = 0; i < dim; ++i) c(i) = gauss(rng);
      CHECK(support(p, c).value ==
            doctest::Approx(vertex_support(verts, c)).epsilon(1e-6));
    }

    // Projection equals the hull of projected vertices.
    if (dim >= 2) {
      std::vector<int> keep;
      for (int i = 0; i < dim - 1; ++i) keep.push_back(i);
      const auto proj = project(p, keep, tol);
      std::vector<Eigen::VectorXd> pv;
      for (const auto& v : verts) pv.push_back(v.segment(0, dim - 1));
      for (const auto& v : pv) CHECK(proj.contains(v, 1e-6));
      for (const auto& w : enumerate_vertices(proj))
        CHECK(in_hull(pv, w, 1e-6));
    }

    // Subset verdicts match vertex membership.
    const auto q = random_bounded_polytope(rng, dim, 3);
    bool all_in = true;
    for (const auto& v : verts)
      if (!q.contains(v, 1e-7)) all_in = false;
    CHECK(is_subset(p, q, 1e-6) == all_in);
  }
}

TEST_CASE("redundancy removal reaches the oracle facet count") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int checked = 0;
  for (int t = 0; t < 60 && checked < 25; ++t) {
    const int dim = 2 + static_cast<int>(rng() % 2);
    const auto base =
        remove_redundancy(random_bounded_polytope(rng, dim, 3));
    // Oracle-side irredundancy: every row needs `dim` affinely independent
    // tight vertices; skip degenerate draws.
    const auto verts = enumerate_vertices(base);
    bool clean = true;
    for (int i = 0; i < base.rows() && clean; ++i) {
      Eigen::MatrixXd tight(0, dim);
      for (const auto& v : verts) {
        if (std::abs(base.A().row(i).dot(v) - base.b()(i)) < 1e-7) {
          tight.conservativeResize(tight.rows() + 1, dim);
          tight.row(tight.rows() - 1) = v.transpose();
        }
      }
      if (tight.rows() < dim) {
        clean = false;
        break;
      }
      Eigen::MatrixXd rel(tight.rows() - 1, dim);
      for (int r = 1; r < tight.rows(); ++r)
        rel.row(r - 1) = tight.row(r) - tight.row(0);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(rel);
      lu.setThreshold(1e-7);
      if (lu.rank() < dim - 1) clean = false;
    }
    if (!clean) continue;
    ++checked;

    // Stack manufactured junk: scaled copies and slackened rows.
    const int m = base.rows();
    Eigen::MatrixXd A(2 * m, dim);
    Eigen::VectorXd b(2 * m);
    A.topRows(m) = base.A();
    b.head(m) = base.b();
    for (int i = 0; i < m; ++i) {
      const double s = 1.0 + std::abs(gauss(rng));
      A.row(m + i) = s * base.A().row(i);
      b(m + i) = s * base.b()(i) + ((i % 2) ? 0.3 : 0.0);
    }
    const auto r = remove_redundancy(Polytope(A, b));
    CHECK(r.rows() == m);
    CHECK(set_equal(r, base, 1e-7));
  }
  CHECK(checked >= 25);
}
