#pragma once

#include <Eigen/Dense>
#include <complex>

namespace ifor {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Steering matrix for a sounded channel: the n_streams right singular
/// vectors of `channel` (n_rx x n_tx) belonging to the largest singular
/// values, largest first. Result is n_tx x n_streams with orthonormal
/// columns. Throws std::invalid_argument on non-finite input or
/// n_streams outside [1, min(n_rx, n_tx)].
ComplexMatrix svd_steering(const ComplexMatrix& channel, Eigen::Index n_streams);

/// max |M'M - I| <= tol, entrywise.
template <typename Derived>
bool is_orthonormal_columns(const Eigen::MatrixBase<Derived>& m, double tol) {
  const Eigen::Index n = m.cols();
  if (n == 0) return true;
  auto gram = (m.adjoint() * m).eval();
  gram -= decltype(gram)::Identity(n, n);
  return gram.cwiseAbs().maxCoeff() <= tol;
}

/// Givens rotation G_{li}(psi): n x n, real-valued, cos(psi) at (i,i) and
/// (l,l), sin(psi) at (i,l), -sin(psi) at (l,i), identity elsewhere.
/// `l` and `i` are 1-based row indices, matching the angle subscripts of
/// the feedback report; requires 1 <= i < l <= n.
ComplexMatrix givens_matrix(Eigen::Index n, Eigen::Index l, Eigen::Index i, double psi);

/// Phase matrix D_i: n x n diagonal with ones on the first i-1 entries,
/// e^{j phis[k]} on diagonal positions i .. n-1 (1-based) and 1 at
/// position n. `phis` must have length n - i; requires 1 <= i <= n-1.
ComplexMatrix d_matrix(Eigen::Index n, Eigen::Index i, const Eigen::VectorXd& phis);

}  // namespace ifor
