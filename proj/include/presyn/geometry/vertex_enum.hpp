#pragma once

#include <Eigen/Dense>
#include <vector>

#include "presyn/geometry/polytope.hpp"

namespace presyn::geom {

/// Vertices of a bounded polytope in dimension 1..3 by brute-force basis
/// enumeration: every dim-subset of rows is solved and feasibility-checked.
/// Near-duplicate solutions are merged. Empty input yields an empty list.
/// Intended for small instances (test oracle, export); throws DimensionError
/// above dimension 3. Unbounded inputs return only the vertices (rays are not
/// reported), so callers keep these bounded.
std::vector<Eigen::VectorXd> enumerate_vertices(const Polytope& p,
                                                const Tol& tol = {});

/// Max c.v over an explicit vertex list (test-oracle support function).
double vertex_support(const std::vector<Eigen::VectorXd>& verts,
                      const Eigen::VectorXd& c);

}  // namespace presyn::geom
