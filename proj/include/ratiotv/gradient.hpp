#pragma once

#include <cmath>

#include "ratiotv/types.hpp"

namespace ratiotv {

// Forward differences with periodic wrap. The result stacks dx over dy:
//   dx(i,j) = u(i, j+1 mod n) - u(i,j)   (rows [0, m))
//   dy(i,j) = u(i+1 mod m, j) - u(i,j)   (rows [m, 2m))
template <typename Derived>
Field<typename Derived::Scalar> gradient(const Eigen::MatrixBase<Derived>& u) {
  const Index m = u.rows(), n = u.cols();
  Field<typename Derived::Scalar> g(2 * m, n);
  g.topRows(m).leftCols(n - 1) = u.rightCols(n - 1) - u.leftCols(n - 1);
  g.topRows(m).col(n - 1) = u.col(0) - u.col(n - 1);
  g.block(m, 0, m - 1, n) = u.bottomRows(m - 1) - u.topRows(m - 1);
  g.row(2 * m - 1) = u.row(0) - u.row(m - 1);
  return g;
}

// Adjoint of `gradient` under the Frobenius inner product: negative periodic
// divergence, mapping a (2m)-by-n field back to an m-by-n image.
template <typename Derived>
Image<typename Derived::Scalar> gradient_adjoint(const Eigen::MatrixBase<Derived>& g) {
  const Index m = g.rows() / 2, n = g.cols();
  Image<typename Derived::Scalar> out(m, n);
  auto dx = g.topRows(m);
  auto dy = g.bottomRows(m);
  out.rightCols(n - 1) = dx.leftCols(n - 1) - dx.rightCols(n - 1);
  out.col(0) = dx.col(n - 1) - dx.col(0);
  out.bottomRows(m - 1) += dy.topRows(m - 1) - dy.bottomRows(m - 1);
  out.row(0) += dy.row(m - 1) - dy.row(0);
  return out;
}

// Eigenvalues of the gradient normal operator on the 2D DFT basis:
//   4 sin^2(pi k / m) + 4 sin^2(pi l / n) at frequency (k, l).
inline ImageXd gradient_gram_spectrum(Index m, Index n) {
  const double pi = 3.14159265358979323846;
  ImageXd s(m, n);
  for (Index j = 0; j < n; ++j) {
    const double sl = std::sin(pi * double(j) / double(n));
    for (Index i = 0; i < m; ++i) {
      const double sk = std::sin(pi * double(i) / double(m));
      s(i, j) = 4.0 * (sk * sk + sl * sl);
    }
  }
  return s;
}

}  // namespace ratiotv
