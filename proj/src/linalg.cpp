#include "hops/linalg.hpp"

#include <algorithm>

#include "hops/error.hpp"
#include "hops/kernels.hpp"

namespace hops {

void gemv(const Matrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.cols() || y.size() != a.rows()) {
    throw DimensionError("linalg.gemv", "gemv shape mismatch");
  }
  const auto& k = kern::ops();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    y[r] = k.dot(a.data() + r * a.cols(), x.data(), a.cols());
  }
}

void gemv_transposed(const Matrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.rows() || y.size() != a.cols()) {
    throw DimensionError("linalg.gemv_t", "transposed gemv shape mismatch");
  }
  std::fill(y.begin(), y.end(), 0.0);
  const auto& k = kern::ops();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    k.axpy(x[r], a.data() + r * a.cols(), y.data(), a.cols());
  }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("linalg.matmul", "matmul inner dimensions differ");
  }
  Matrix c(a.rows(), b.cols());
  const auto& k = kern::ops();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double* arow = a.data() + r * a.cols();
    double* crow = c.data() + r * b.cols();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      if (arow[i] != 0.0) k.axpy(arow[i], b.data() + i * b.cols(), crow, b.cols());
    }
  }
  return c;
}

Matrix gram(const Matrix& x) {
  const std::size_t n = x.cols();
  const std::size_t m = x.rows();
  Matrix g(n, n);
  const auto& k = kern::ops();
  constexpr std::size_t kBlock = 256;
  for (std::size_t p0 = 0; p0 < m; p0 += kBlock) {
    std::size_t p1 = std::min(m, p0 + kBlock);
    for (std::size_t i = 0; i < n; ++i) {
      double* grow = g.data() + i * n;
      for (std::size_t p = p0; p < p1; ++p) {
        const double* xrow = x.data() + p * n;
        if (xrow[i] != 0.0) k.axpy(xrow[i], xrow + i, grow + i, n - i);
      }
    }
  }
  // mirror the upper triangle
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) g(j, i) = g(i, j);
  }
  return g;
}

}  // namespace hops
