#include "presyn/geometry/vertex_enum.hpp"

#include <algorithm>
#include <cmath>

#include "presyn/errors.hpp"

namespace presyn::geom {

std::vector<Eigen::VectorXd> enumerate_vertices(const Polytope& p,
                                                const Tol& tol) {
  const int n = p.dim();
  if (n > 3) throw DimensionError("enumerate_vertices: dimension > 3");
  std::vector<Eigen::VectorXd> verts;
  if (is_empty(p, tol)) return verts;
  const Polytope q = p.normalized();
  const int m = q.rows();
  if (m < n) return verts;  // cannot pin a vertex

  std::vector<int> idx(n);
  auto try_basis = [&]() {
    Eigen::MatrixXd M(n, n);
    Eigen::VectorXd rhs(n);
    for (int k = 0; k < n; ++k) {
      M.row(k) = q.A().row(idx[k]);
      rhs(k) = q.b()(idx[k]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    lu.setThreshold(1e-9);
    if (lu.rank() < n) return;
    const Eigen::VectorXd v = lu.solve(rhs);
    if (!v.allFinite()) return;
    if (!q.contains(v, 10 * tol.eps)) return;
    for (const auto& w : verts)
      if ((w - v).lpNorm<Eigen::Infinity>() < 1e-6) return;
    verts.push_back(v);
  };

  // All n-subsets of rows, n <= 3.
  if (n == 1) {
    for (idx[0] = 0; idx[0] < m; ++idx[0]) try_basis();
  } else if (n == 2) {
    for (idx[0] = 0; idx[0] < m; ++idx[0])
      for (idx[1] = idx[0] + 1; idx[1] < m; ++idx[1]) try_basis();
  } else {
    for (idx[0] = 0; idx[0] < m; ++idx[0])
      for (idx[1] = idx[0] + 1; idx[1] < m; ++idx[1])
        for (idx[2] = idx[1] + 1; idx[2] < m; ++idx[2]) try_basis();
  }
  return verts;
}

double vertex_support(const std::vector<Eigen::VectorXd>& verts,
                      const Eigen::VectorXd& c) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : verts) best = std::max(best, c.dot(v));
  return best;
}

}  // namespace presyn::geom
