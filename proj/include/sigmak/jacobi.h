#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Jacobi>

#include "sigmak/symfun.h"

namespace sigmak {

template <typename Scalar>
struct SymEigen {
  VectorX<Scalar> values;   // ascending
  MatrixX<Scalar> vectors;  // columns match values
  int sweeps = 0;
};

/// Cyclic Jacobi rotations on a symmetric matrix, stopping once every
/// off-diagonal magnitude is below rel_tol * ||M||_F.
template <typename Derived>
SymEigen<typename Derived::Scalar> jacobi_eigen(const Eigen::MatrixBase<Derived>& m,
                                                typename Derived::Scalar rel_tol = 1e-12,
                                                int max_sweeps = 100) {
  using Scalar = typename Derived::Scalar;
  using std::abs;
  if (m.rows() != m.cols()) throw invalid_input("jacobi_eigen needs a square matrix");
  if (!m.allFinite()) throw invalid_input("jacobi_eigen needs finite entries");
  const Eigen::Index n = m.rows();
  MatrixX<Scalar> a = m;
  MatrixX<Scalar> v = MatrixX<Scalar>::Identity(n, n);
  const Scalar bar = rel_tol * a.norm();
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    Scalar off(0);
    for (Eigen::Index q = 1; q < n; ++q) {
      for (Eigen::Index p = 0; p < q; ++p) off = std::max(off, abs(a(p, q)));
    }
    if (!(off > bar)) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == Scalar(0)) continue;
        Eigen::JacobiRotation<Scalar> j;
        j.makeJacobi(a, p, q);
        a.applyOnTheLeft(p, q, j.adjoint());
        a.applyOnTheRight(p, q, j);
        v.applyOnTheRight(p, q, j);
        a(p, q) = a(q, p) = Scalar(0);
      }
    }
  }
  SymEigen<Scalar> out;
  out.sweeps = sweep;
  std::vector<Eigen::Index> order(n);
  for (Eigen::Index t = 0; t < n; ++t) order[t] = t;
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index x, Eigen::Index y) { return a(x, x) < a(y, y); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index t = 0; t < n; ++t) {
    out.values(t) = a(order[t], order[t]);
    out.vectors.col(t) = v.col(order[t]);
  }
  return out;
}

template <typename Derived>
typename Derived::Scalar min_eig(const Eigen::MatrixBase<Derived>& m) {
  return jacobi_eigen(m).values(0);
}

/// lambda_min / ||M||_F, the scale-free positivity margin (0 for M = 0).
template <typename Derived>
typename Derived::Scalar psd_slack(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const Scalar f = m.norm();
  if (f == Scalar(0)) return Scalar(0);
  return min_eig(m) / f;
}

}  // namespace sigmak
