#include <cmath>
#include <limits>

#include <doctest.h>

#include "hops/error.hpp"
#include "hops/linalg.hpp"
#include "hops/matrix.hpp"
#include "oracles.hpp"

using namespace hops;

TEST_SUITE("matrix") {

TEST_CASE("construction validates shape and finiteness") {
  CHECK_THROWS_AS(Matrix(2, 2, {1.0, 2.0, 3.0}), DimensionError);
  CHECK_THROWS_AS(Matrix(1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()}),
                  NumericalError);
  CHECK_THROWS_AS(Matrix(1, 1, {std::numeric_limits<double>::infinity()}), NumericalError);
  Matrix ok(2, 2, {1, 2, 3, 4});
  CHECK(ok(1, 0) == 3);
}

TEST_CASE("transpose, column selection, row slices") {
  Matrix m(2, 3, {1, 2, 3, 4, 5, 6});
  Matrix t = m.transposed();
  CHECK(t.rows() == 3);
  CHECK(t(0, 1) == 4);
  std::vector<std::size_t> keep{2, 0};
  Matrix s = m.select_columns(keep);
  CHECK(s(0, 0) == 3);
  CHECK(s(1, 1) == 4);
  Matrix d = m.drop_column(1);
  CHECK(d.cols() == 2);
  CHECK(d(1, 1) == 6);
  Matrix r = m.select_rows(1, 2);
  CHECK(r.rows() == 1);
  CHECK(r(0, 0) == 4);
}

TEST_CASE("fingerprint changes with content") {
  Matrix a(2, 2, {1, 2, 3, 4});
  Matrix b(2, 2, {1, 2, 3, 5});
  CHECK(a.fingerprint() == a.fingerprint());
  CHECK(a.fingerprint().hash != b.fingerprint().hash);
  CHECK(a.fingerprint().rows == 2);
}

TEST_CASE("gemv and matmul match naive loops") {
  Matrix a = oracle::random_matrix(7, 5, 1);
  Matrix b = oracle::random_matrix(5, 4, 2);
  auto x = oracle::random_vector(5, 3);

  std::vector<double> y(7, 0.0);
  gemv(a, x, y);
  for (std::size_t r = 0; r < 7; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < 5; ++c) acc += a(r, c) * x[c];
    CHECK(y[r] == doctest::Approx(acc).epsilon(1e-13));
  }

  std::vector<double> yt(5, 0.0);
  auto xr = oracle::random_vector(7, 4);
  gemv_transposed(a, xr, yt);
  for (std::size_t c = 0; c < 5; ++c) {
    double acc = 0.0;
    for (std::size_t r = 0; r < 7; ++r) acc += a(r, c) * xr[r];
    CHECK(yt[c] == doctest::Approx(acc).epsilon(1e-13));
  }

  Matrix c = matmul(a, b);
  for (std::size_t r = 0; r < 7; ++r) {
    for (std::size_t j = 0; j < 4; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < 5; ++k) acc += a(r, k) * b(k, j);
      CHECK(c(r, j) == doctest::Approx(acc).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(matmul(a, a), DimensionError);
}

TEST_CASE("gram equals X^T X") {
  Matrix x = oracle::random_matrix(300, 9, 5);
  Matrix g = gram(x);
  Matrix ref = matmul(x.transposed(), x);
  for (std::size_t i = 0; i < 9; ++i) {
    for (std::size_t j = 0; j < 9; ++j) {
      CHECK(g(i, j) == doctest::Approx(ref(i, j)).epsilon(1e-11));
    }
  }
  for (std::size_t i = 0; i < 9; ++i) {
    for (std::size_t j = 0; j < 9; ++j) CHECK(g(i, j) == g(j, i));
  }
}

}  // TEST_SUITE
