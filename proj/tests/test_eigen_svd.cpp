#include <cmath>

#include <doctest.h>

#include "hops/eigen_sym.hpp"
#include "hops/error.hpp"
#include "hops/linalg.hpp"
#include "hops/svd.hpp"
#include "oracles.hpp"

using namespace hops;

namespace {

// A v = lambda v residuals and orthonormality of the eigenbasis
void check_eigen_quality(const Matrix& a, const SymmetricEigen& eig, double tol) {
  const std::size_t n = a.rows();
  double scale = a.frobenius_norm() + 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t r = 0; r < n; ++r) {
      double av = 0.0;
      for (std::size_t c = 0; c < n; ++c) av += a(r, c) * eig.vectors(c, j);
      CHECK(std::abs(av - eig.values[j] * eig.vectors(r, j)) <= tol * scale);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t r = 0; r < n; ++r) dot += eig.vectors(r, i) * eig.vectors(r, j);
      CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) <= 1e-12);
    }
  }
}

Matrix random_symmetric(std::size_t n, unsigned seed) {
  Matrix b = oracle::random_matrix(n, n, seed);
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) s(i, j) = 0.5 * (b(i, j) + b(j, i));
  }
  return s;
}

}  // namespace

TEST_SUITE("eigen") {

TEST_CASE("small and degenerate matrices") {
  SymmetricEigen e1 = eigen_sym(Matrix(1, 1, {4.5}));
  CHECK(e1.values[0] == doctest::Approx(4.5));

  SymmetricEigen ez = eigen_sym(Matrix(3, 3));
  for (double v : ez.values) CHECK(v == doctest::Approx(0.0));

  SymmetricEigen eid = eigen_sym(Matrix::identity(5));
  for (double v : eid.values) CHECK(v == doctest::Approx(1.0));
  check_eigen_quality(Matrix::identity(5), eid, 1e-13);

  Matrix two(2, 2, {0.0, 3.0, 3.0, 0.0});
  SymmetricEigen e2 = eigen_sym(two);
  CHECK(e2.values[0] == doctest::Approx(3.0));
  CHECK(e2.values[1] == doctest::Approx(-3.0));
  check_eigen_quality(two, e2, 1e-13);
}

TEST_CASE("random symmetric matrices across sizes") {
  for (std::size_t n : {2u, 3u, 5u, 8u, 13u, 21u, 40u}) {
    Matrix a = random_symmetric(n, 31 + static_cast<unsigned>(n));
    SymmetricEigen eig = eigen_sym(a);
    check_eigen_quality(a, eig, 1e-11);
    for (std::size_t i = 1; i < n; ++i) CHECK(eig.values[i - 1] >= eig.values[i]);
  }
}

TEST_CASE("eigenvalues of a Gram matrix match the squared singular values") {
  Matrix x = oracle::random_matrix(40, 12, 77);
  SymmetricEigen eig = eigen_sym(gram(x));
  auto sigma = oracle::jacobi_singular_values(x);
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    CHECK(eig.values[i] == doctest::Approx(sigma[i] * sigma[i]).epsilon(1e-10));
  }
}

}  // TEST_SUITE

TEST_SUITE("svd") {

TEST_CASE("identity and diagonal cases") {
  SvdResult id = thin_svd(Matrix::identity(3));
  for (double s : id.singular_values) CHECK(s == doctest::Approx(1.0));

  Matrix d(3, 2, {3, 0, 0, 2, 0, 0});
  SvdResult sd = thin_svd(d);
  CHECK(sd.singular_values[0] == doctest::Approx(3.0));
  CHECK(sd.singular_values[1] == doctest::Approx(2.0));
}

TEST_CASE("random matrix against the one-sided Jacobi oracle") {
  Matrix x = oracle::random_matrix(50, 8, 11);
  SvdResult svd = thin_svd(x);
  auto sigma = oracle::jacobi_singular_values(x);
  REQUIRE(svd.singular_values.size() == sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    CHECK(std::abs(svd.singular_values[i] - sigma[i]) < 1e-9);
  }
}

TEST_CASE("reconstruction, energy identity, orthonormality") {
  for (unsigned seed : {1u, 2u, 3u}) {
    Matrix x = oracle::random_matrix(30, 7, seed);
    SvdResult svd = thin_svd(x, true);

    Matrix rec = svd.reconstruct();
    double err = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double dlt = rec.data()[i] - x.data()[i];
      err += dlt * dlt;
    }
    const double xf2 = x.frobenius_norm() * x.frobenius_norm();
    CHECK(std::sqrt(err / xf2) < 1e-8);

    double energy = 0.0;
    for (double s : svd.singular_values) energy += s * s;
    CHECK(energy == doctest::Approx(xf2).epsilon(1e-8));

    for (std::size_t i = 0; i < svd.right_vectors.cols(); ++i) {
      for (std::size_t j = 0; j < svd.right_vectors.cols(); ++j) {
        double dot = 0.0;
        for (std::size_t r = 0; r < svd.right_vectors.rows(); ++r) {
          dot += svd.right_vectors(r, i) * svd.right_vectors(r, j);
        }
        CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) <= 1e-10);
      }
    }
  }
}

TEST_CASE("wide matrices and rank deficiency") {
  Matrix x = oracle::random_matrix(5, 9, 21);
  SvdResult svd = thin_svd(x, true);
  CHECK(svd.singular_values.size() == 5);
  CHECK(svd.rank() == 5);

  // duplicate a column: rank drops
  Matrix lowrank(6, 4);
  Matrix base = oracle::random_matrix(6, 2, 22);
  for (std::size_t r = 0; r < 6; ++r) {
    lowrank(r, 0) = base(r, 0);
    lowrank(r, 1) = base(r, 1);
    lowrank(r, 2) = base(r, 0);
    lowrank(r, 3) = base(r, 0) + base(r, 1);
  }
  SvdResult lr = thin_svd(lowrank);
  CHECK(lr.rank() == 2);
}

TEST_CASE("determinism: identical input, identical bits") {
  Matrix x = oracle::random_matrix(25, 6, 9);
  SvdResult a = thin_svd(x, true);
  SvdResult b = thin_svd(x, true);
  CHECK(a.singular_values == b.singular_values);
  CHECK(a.right_vectors == b.right_vectors);
  CHECK(a.left_vectors == b.left_vectors);
}

TEST_CASE("thin_svd input validation") {
  CHECK_THROWS_AS(thin_svd(Matrix()), DimensionError);
}

}  // TEST_SUITE

TEST_SUITE("lstsq") {

TEST_CASE("identity system") {
  std::vector<double> y{1, 2, 3};
  auto w = lstsq_minnorm(Matrix::identity(3), y);
  for (std::size_t i = 0; i < 3; ++i) CHECK(w[i] == doctest::Approx(y[i]).epsilon(1e-12));
}

TEST_CASE("duplicated column: exact fit with minimum norm") {
  Matrix base = oracle::random_matrix(12, 1, 33);
  Matrix a(12, 2);
  std::vector<double> y(12);
  for (std::size_t r = 0; r < 12; ++r) {
    a(r, 0) = base(r, 0);
    a(r, 1) = base(r, 0);
    y[r] = 2.0 * base(r, 0);
  }
  auto w = lstsq_minnorm(a, y);
  // fitted values reproduce y
  for (std::size_t r = 0; r < 12; ++r) {
    CHECK(a(r, 0) * w[0] + a(r, 1) * w[1] == doctest::Approx(y[r]).epsilon(1e-9));
  }
  // the symmetric split is the minimum-norm solution
  CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(w[1] == doctest::Approx(1.0).epsilon(1e-8));
  const double norm = w[0] * w[0] + w[1] * w[1];
  for (double t : {0.5, 0.9, 1.3, 1.9}) {
    const double alt = t * t + (2.0 - t) * (2.0 - t);  // also solves exactly
    CHECK(norm <= alt + 1e-9);
  }
}

TEST_CASE("full-rank system matches the normal equations") {
  Matrix a = oracle::random_matrix(20, 5, 44);
  auto y = oracle::random_vector(20, 45);
  auto w = lstsq_minnorm(a, y);

  Matrix g = gram(a);
  std::vector<double> aty(5, 0.0);
  gemv_transposed(a, y, aty);
  auto ref = oracle::gauss_solve(g, aty);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(w[i] == doctest::Approx(ref[i]).epsilon(1e-8));
  }
}

TEST_CASE("residual is orthogonal to the column space") {
  Matrix a = oracle::random_matrix(30, 6, 55);
  auto y = oracle::random_vector(30, 56);
  auto w = lstsq_minnorm(a, y);
  std::vector<double> resid(30);
  gemv(a, w, resid);
  for (std::size_t i = 0; i < 30; ++i) resid[i] -= y[i];
  std::vector<double> at_r(6, 0.0);
  gemv_transposed(a, resid, at_r);
  double scale = a.frobenius_norm() * std::sqrt(norm_sq(y));
  for (double v : at_r) CHECK(std::abs(v) <= 1e-6 * scale);
}

TEST_CASE("dimension mismatch") {
  std::vector<double> y{1, 2};
  CHECK_THROWS_AS(lstsq_minnorm(Matrix::identity(3), y), DimensionError);
}

}  // TEST_SUITE
