#pragma once

#include <random>

#include <Eigen/Dense>

#include "ifor/cbf_codec.hpp"
#include "ifor/linalg.hpp"

namespace helpers {

inline Eigen::MatrixXcd random_complex_gaussian(Eigen::Index rows, Eigen::Index cols,
                                                std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = {normal(rng), normal(rng)};
  return m;
}

/// Haar-ish random matrix with orthonormal columns via QR.
inline Eigen::MatrixXcd random_orthonormal(Eigen::Index rows, Eigen::Index cols,
                                           std::mt19937_64& rng) {
  const Eigen::MatrixXcd g = random_complex_gaussian(rows, rows, rng);
  const Eigen::MatrixXcd q = Eigen::HouseholderQR<Eigen::MatrixXcd>(g).householderQ();
  return q.leftCols(cols);
}

/// Uniform draw over the valid angle ranges for an n_r x n_c vector.
inline ifor::AngleVector random_angle_vector(int n_r, int n_c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const auto mask = ifor::phi_positions(n_r, n_c);
  ifor::AngleVector a;
  a.n_r = n_r;
  a.n_c = n_c;
  a.angles.resize(Eigen::Index(mask.size()));
  for (std::size_t k = 0; k < mask.size(); ++k) {
    const double u = uni(rng);
    a.angles(Eigen::Index(k)) =
        mask[k] ? u * 2.0 * std::numbers::pi * (1.0 - 1e-16) : u * std::numbers::pi / 2.0;
  }
  return a;
}

inline double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

/// Frobenius distance between the column-span projectors of V and W.
inline double projector_distance(const Eigen::MatrixXcd& v, const Eigen::MatrixXcd& w) {
  return (v * v.adjoint() - w * w.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace helpers
