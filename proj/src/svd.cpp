#include "hops/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hops/error.hpp"
#include "hops/kernels.hpp"
#include "hops/linalg.hpp"

namespace hops {

double rank_cutoff_ratio(std::size_t cols) {
  const double eps = std::numeric_limits<double>::epsilon();
  return std::max(kSingularCutoff, std::sqrt(16.0 * static_cast<double>(cols) * eps));
}

std::size_t SvdResult::rank() const {
  if (singular_values.empty()) return 0;
  const double cutoff = singular_values.front() * rank_cutoff_ratio(source_cols);
  std::size_t r = 0;
  while (r < singular_values.size() && singular_values[r] > cutoff) ++r;
  return r;
}

Matrix SvdResult::reconstruct() const {
  if (left_vectors.empty()) {
    throw DimensionError("svd.reconstruct", "left vectors were not requested");
  }
  const std::size_t r = left_vectors.cols();
  Matrix x(source_rows, source_cols);
  for (std::size_t i = 0; i < source_rows; ++i) {
    double* out = x.data() + i * source_cols;
    for (std::size_t k = 0; k < r; ++k) {
      double w = left_vectors(i, k) * singular_values[k];
      for (std::size_t j = 0; j < source_cols; ++j) {
        out[j] += w * right_vectors(j, k);
      }
    }
  }
  return x;
}

SvdResult thin_svd(const Matrix& x, bool want_left) {
  if (x.rows() == 0 || x.cols() == 0) {
    throw DimensionError("svd.empty", "thin_svd expects a non-empty matrix");
  }
  if (!x.all_finite()) {
    throw NumericalError("svd.non_finite", "thin_svd input contains NaN or Inf");
  }
  const std::size_t m = x.rows();
  const std::size_t n = x.cols();
  const std::size_t r = std::min(m, n);

  SymmetricEigen eig = eigen_sym(gram(x));

  SvdResult out;
  out.source_rows = m;
  out.source_cols = n;
  out.singular_values.resize(r);
  for (std::size_t i = 0; i < r; ++i) {
    out.singular_values[i] = std::sqrt(std::max(eig.values[i], 0.0));
  }
  if (r == n) {
    out.right_vectors = std::move(eig.vectors);
  } else {
    std::vector<std::size_t> keep(r);
    for (std::size_t i = 0; i < r; ++i) keep[i] = i;
    out.right_vectors = eig.vectors.select_columns(keep);
  }

  if (want_left) {
    const std::size_t rank = out.rank();
    Matrix u(m, rank);
    std::vector<double> col(m);
    for (std::size_t k = 0; k < rank; ++k) {
      const double inv = 1.0 / out.singular_values[k];
      for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        const double* xrow = x.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) acc += xrow[j] * out.right_vectors(j, k);
        u(i, k) = acc * inv;
      }
    }
    out.left_vectors = std::move(u);
  }
  return out;
}

std::vector<double> lstsq_from_gram(const SymmetricEigen& gram_eig,
                                    std::span<const double> at_y) {
  const std::size_t n = at_y.size();
  if (gram_eig.vectors.rows() != n) {
    throw DimensionError("svd.lstsq", "gram eigendecomposition does not match A^T y");
  }
  double lambda_max = gram_eig.values.empty() ? 0.0 : std::max(gram_eig.values.front(), 0.0);
  const double ratio = rank_cutoff_ratio(n);
  const double lambda_cutoff = lambda_max * ratio * ratio;

  // w = V f(L) V^T A^T y with f(l) = 1/l on the retained spectrum
  std::vector<double> w(n, 0.0);
  std::vector<double> vcol(n);
  const auto& k = kern::ops();
  for (std::size_t j = 0; j < n; ++j) {
    const double lambda = gram_eig.values[j];
    if (!(lambda > lambda_cutoff) || lambda <= 0.0) break;  // values are sorted
    for (std::size_t i = 0; i < n; ++i) vcol[i] = gram_eig.vectors(i, j);
    const double coef = k.dot(vcol.data(), at_y.data(), n) / lambda;
    k.axpy(coef, vcol.data(), w.data(), n);
  }
  return w;
}

std::vector<double> lstsq_minnorm(const Matrix& a, std::span<const double> y) {
  if (a.rows() != y.size()) {
    throw DimensionError("svd.lstsq", "A and y row counts differ");
  }
  std::vector<double> at_y(a.cols(), 0.0);
  gemv_transposed(a, y, at_y);
  return lstsq_from_gram(eigen_sym(gram(a)), at_y);
}

}  // namespace hops
