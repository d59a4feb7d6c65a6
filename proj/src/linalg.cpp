#include "ifor/linalg.hpp"

#include <Eigen/SVD>
#include <stdexcept>

namespace ifor {

ComplexMatrix svd_steering(const ComplexMatrix& channel, Eigen::Index n_streams) {
  if (channel.rows() < 1 || channel.cols() < 1)
    throw std::invalid_argument("svd_steering: empty channel matrix");
  if (!channel.allFinite())
    throw std::invalid_argument("svd_steering: channel matrix has non-finite entries");
  const Eigen::Index max_streams = std::min(channel.rows(), channel.cols());
  if (n_streams < 1 || n_streams > max_streams)
    throw std::invalid_argument("svd_steering: n_streams outside [1, min(n_rx, n_tx)]");

  Eigen::JacobiSVD<ComplexMatrix> svd(channel, Eigen::ComputeThinV);
  return svd.matrixV().leftCols(n_streams);
}

ComplexMatrix givens_matrix(Eigen::Index n, Eigen::Index l, Eigen::Index i, double psi) {
  if (n < 2 || i < 1 || l <= i || l > n)
    throw std::out_of_range("givens_matrix: require 1 <= i < l <= n");
  ComplexMatrix g = ComplexMatrix::Identity(n, n);
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  g(i - 1, i - 1) = c;
  g(l - 1, l - 1) = c;
  g(i - 1, l - 1) = s;
  g(l - 1, i - 1) = -s;
  return g;
}

ComplexMatrix d_matrix(Eigen::Index n, Eigen::Index i, const Eigen::VectorXd& phis) {
  if (n < 2 || i < 1 || i > n - 1)
    throw std::out_of_range("d_matrix: require 1 <= i <= n-1");
  if (phis.size() != n - i)
    throw std::invalid_argument("d_matrix: phis must have length n - i");
  ComplexMatrix d = ComplexMatrix::Identity(n, n);
  for (Eigen::Index l = i; l <= n - 1; ++l)
    d(l - 1, l - 1) = std::polar(1.0, phis(l - i));
  return d;
}

}  // namespace ifor
