#include "ifor/linalg.hpp"

#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace ifor;

TEST_CASE("jacobi oracle validates itself") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + Eigen::Index(rng() % 15);
    const Eigen::MatrixXcd x = helpers::random_complex_gaussian(n, n, rng);
    const Eigen::MatrixXcd a = x * x.adjoint();
    Eigen::VectorXd lam;
    Eigen::MatrixXcd v;
    oracles::jacobi_hermitian_eig(a, lam, v);
    CHECK(helpers::max_abs_diff(a * v, v * lam.asDiagonal().toDenseMatrix().cast<Complex>()) <
          1e-9);
    CHECK(is_orthonormal_columns(v, 1e-12));
    for (Eigen::Index i = 0; i + 1 < n; ++i) CHECK(lam(i) >= lam(i + 1));
  }
}

TEST_CASE("svd_steering on identity returns a unitary basis") {
  const ComplexMatrix v = svd_steering(ComplexMatrix::Identity(2, 2), 2);
  REQUIRE(v.rows() == 2);
  REQUIRE(v.cols() == 2);
  CHECK(is_orthonormal_columns(v, 1e-12));
}

TEST_CASE("svd_steering on diag(2,1) picks the dominant axis") {
  ComplexMatrix h = ComplexMatrix::Zero(2, 2);
  h(0, 0) = 2.0;
  h(1, 1) = 1.0;
  const ComplexMatrix v = svd_steering(h, 1);
  REQUIRE(v.rows() == 2);
  REQUIRE(v.cols() == 1);
  CHECK(std::abs(v(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(v(1, 0)) < 1e-12);
}

TEST_CASE("svd_steering columns are top eigenvectors of H'H") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index n_rx = trial < 5 ? 16 : 2 + Eigen::Index(rng() % 3);
    const Eigen::Index n_tx = trial < 5 ? 16 : 2 + Eigen::Index(rng() % 15);
    const Eigen::Index n_streams = 1 + Eigen::Index(rng() % std::min<Eigen::Index>(n_rx, n_tx));
    const ComplexMatrix h = helpers::random_complex_gaussian(n_rx, n_tx, rng);
    const ComplexMatrix v = svd_steering(h, n_streams);

    REQUIRE(v.rows() == n_tx);
    REQUIRE(v.cols() == n_streams);
    CHECK(is_orthonormal_columns(v, 1e-10));

    const ComplexMatrix gram = h.adjoint() * h;
    Eigen::VectorXd lam;
    Eigen::MatrixXcd eig;
    oracles::jacobi_hermitian_eig(gram, lam, eig);

    // H'H V == V diag(top eigenvalues)
    const ComplexMatrix lhs = gram * v;
    const ComplexMatrix rhs = v * lam.head(n_streams).asDiagonal().toDenseMatrix().cast<Complex>();
    CHECK(helpers::max_abs_diff(lhs, rhs) < 1e-8);

    // Same subspace as the oracle's top eigenvectors (projector match),
    // provided the spectrum has a gap at the cut.
    if (n_streams == n_rx || lam(n_streams - 1) - lam(n_streams) > 1e-6)
      CHECK(helpers::projector_distance(v, eig.leftCols(n_streams)) < 1e-7);

    // ||H v_k|| non-increasing across columns.
    for (Eigen::Index k = 0; k + 1 < n_streams; ++k)
      CHECK((h * v.col(k)).norm() >= (h * v.col(k + 1)).norm() - 1e-12);
  }
}

TEST_CASE("svd_steering rejects bad input") {
  const ComplexMatrix h = ComplexMatrix::Identity(2, 4);
  CHECK_THROWS_AS(svd_steering(h, 0), std::invalid_argument);
  CHECK_THROWS_AS(svd_steering(h, 3), std::invalid_argument);
  ComplexMatrix bad = h;
  bad(0, 0) = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
  CHECK_THROWS_AS(svd_steering(bad, 1), std::invalid_argument);
}

TEST_CASE("is_orthonormal_columns examples") {
  CHECK(is_orthonormal_columns(ComplexMatrix::Identity(3, 3), 1e-12));
  CHECK_FALSE(is_orthonormal_columns(ComplexMatrix::Ones(2, 2), 1e-12));
  std::mt19937_64 rng(5);
  const ComplexMatrix h = helpers::random_complex_gaussian(4, 6, rng);
  CHECK(is_orthonormal_columns(svd_steering(h, 2), 1e-10));
}

TEST_CASE("givens_matrix structure") {
  SUBCASE("psi = 0 is the identity") {
    CHECK(helpers::max_abs_diff(givens_matrix(2, 2, 1, 0.0), ComplexMatrix::Identity(2, 2)) ==
          0.0);
  }
  SUBCASE("psi = pi/2 in 2 dimensions") {
    ComplexMatrix expect(2, 2);
    expect << 0, 1, -1, 0;
    CHECK(helpers::max_abs_diff(givens_matrix(2, 2, 1, std::numbers::pi / 2), expect) < 1e-15);
  }
  SUBCASE("block placement for n=4, l=3, i=2") {
    const double psi = std::numbers::pi / 4;
    const ComplexMatrix g = givens_matrix(4, 3, 2, psi);
    const double c = std::cos(psi), s = std::sin(psi);
    CHECK(g(0, 0) == Complex(1, 0));
    CHECK(g(3, 3) == Complex(1, 0));
    CHECK(g(1, 1) == Complex(c, 0));
    CHECK(g(2, 2) == Complex(c, 0));
    CHECK(g(1, 2) == Complex(s, 0));
    CHECK(g(2, 1) == Complex(-s, 0));
    for (Eigen::Index r = 0; r < 4; ++r)
      for (Eigen::Index col = 0; col < 4; ++col)
        if ((r == 0 || r == 3 || col == 0 || col == 3) && r != col)
          CHECK(g(r, col) == Complex(0, 0));
  }
  SUBCASE("index validation") {
    CHECK_THROWS_AS(givens_matrix(4, 2, 2, 0.1), std::out_of_range);
    CHECK_THROWS_AS(givens_matrix(4, 5, 1, 0.1), std::out_of_range);
    CHECK_THROWS_AS(givens_matrix(4, 1, 0, 0.1), std::out_of_range);
  }
}

TEST_CASE("givens matrices are orthogonal for random parameters") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(0.0, std::numbers::pi / 2);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 2 + Eigen::Index(rng() % 15);
    const Eigen::Index i = 1 + Eigen::Index(rng() % (n - 1));
    const Eigen::Index l = i + 1 + Eigen::Index(rng() % (n - i));
    const ComplexMatrix g = givens_matrix(n, l, i, uni(rng));
    CHECK(helpers::max_abs_diff(g.transpose() * g, ComplexMatrix::Identity(n, n)) <= 1e-14);
  }
}

TEST_CASE("d_matrix structure") {
  SUBCASE("zero phases give the identity") {
    CHECK(helpers::max_abs_diff(d_matrix(3, 1, Eigen::VectorXd::Zero(2)),
                                ComplexMatrix::Identity(3, 3)) == 0.0);
  }
  SUBCASE("n=2, i=1, phi=pi/2 gives diag(j, 1)") {
    Eigen::VectorXd phis(1);
    phis << std::numbers::pi / 2;
    const ComplexMatrix d = d_matrix(2, 1, phis);
    CHECK(std::abs(d(0, 0) - Complex(0, 1)) < 1e-15);
    CHECK(d(1, 1) == Complex(1, 0));
    CHECK(d(0, 1) == Complex(0, 0));
    CHECK(d(1, 0) == Complex(0, 0));
  }
  SUBCASE("n=4, i=2 places phases on rows 2..3 only") {
    Eigen::VectorXd phis(2);
    phis << 0.3, 1.1;
    const ComplexMatrix d = d_matrix(4, 2, phis);
    CHECK(d(0, 0) == Complex(1, 0));
    CHECK(std::abs(d(1, 1) - std::polar(1.0, 0.3)) < 1e-15);
    CHECK(std::abs(d(2, 2) - std::polar(1.0, 1.1)) < 1e-15);
    CHECK(d(3, 3) == Complex(1, 0));
  }
  SUBCASE("length validation") {
    CHECK_THROWS_AS(d_matrix(4, 2, Eigen::VectorXd::Zero(3)), std::invalid_argument);
    CHECK_THROWS_AS(d_matrix(4, 4, Eigen::VectorXd::Zero(0)), std::out_of_range);
  }
}

TEST_CASE("d_matrix is unitary for random phases") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uni(0.0, 2 * std::numbers::pi);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 2 + Eigen::Index(rng() % 15);
    const Eigen::Index i = 1 + Eigen::Index(rng() % (n - 1));
    Eigen::VectorXd phis(n - i);
    for (Eigen::Index k = 0; k < phis.size(); ++k) phis(k) = uni(rng);
    const ComplexMatrix d = d_matrix(n, i, phis);
    CHECK(helpers::max_abs_diff(d * d.adjoint(), ComplexMatrix::Identity(n, n)) <= 1e-14);
  }
}
