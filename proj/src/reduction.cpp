#include "hops/reduction.hpp"

#include <string>

#include "hops/error.hpp"
#include "hops/kernels.hpp"
#include "hops/linalg.hpp"
#include "hops/util.hpp"

namespace hops {

ReductionMap ReductionMap::raw(Matrix l) {
  ReductionMap map;
  map.source_dims = l.rows();
  map.target_dim = l.cols();
  map.embed = std::move(l);
  return map;
}

ReductionMap fit_reduction(const Matrix& x_train, std::size_t k) {
  const std::size_t limit = std::min(x_train.rows(), x_train.cols());
  if (k < 1 || k > limit) {
    throw DimensionError("reduction.k_range",
                         "embedding dimension k=" + std::to_string(k) +
                             " outside [1, min(rows, cols)=" + std::to_string(limit) + "]");
  }
  return reduction_from_svd(thin_svd(x_train), k, x_train.fingerprint());
}

ReductionMap reduction_from_svd(const SvdResult& svd, std::size_t k,
                                Fingerprint fitted_on) {
  if (k < 1 || k > svd.right_vectors.cols()) {
    throw DimensionError("reduction.k_range", "k exceeds available singular vectors");
  }
  const std::size_t n = svd.right_vectors.rows();
  Matrix l(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) l(i, j) = svd.right_vectors(i, j);
  }
  ReductionMap map;
  map.embed = std::move(l);
  map.source_dims = n;
  map.target_dim = k;
  map.fitted_on = fitted_on;
  return map;
}

Matrix apply_reduction(const Matrix& x, const ReductionMap& map, LeakageGuard guard) {
  if (x.cols() != map.source_dims) {
    throw DimensionError("reduction.dims",
                         "matrix has " + std::to_string(x.cols()) +
                             " columns, map expects " + std::to_string(map.source_dims));
  }
  if (guard != LeakageGuard::off && map.fitted_on.hash != 0 &&
      x.fingerprint() == map.fitted_on) {
    const std::string msg =
        "reduction map applied to the matrix it was fitted on while the data "
        "was declared out-of-sample";
    if (guard == LeakageGuard::strict) throw DataError("reduction.leakage", msg);
    emit_warning(msg);
  }
  return matmul(x, map.embed);
}

double reconstruction_loss(const Matrix& x, const ReductionMap& map) {
  if (x.cols() != map.source_dims) {
    throw DimensionError("reduction.dims", "reconstruction_loss shape mismatch");
  }
  const std::size_t k = map.target_dim;
  std::vector<double> z(k);
  std::vector<double> back(x.cols());
  double loss = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    // z = x L, back = z L^T
    for (std::size_t j = 0; j < k; ++j) z[j] = 0.0;
    for (std::size_t i = 0; i < x.cols(); ++i) {
      if (row[i] != 0.0) kern::axpy(row[i], map.embed.data() + i * k, z.data(), k);
    }
    std::fill(back.begin(), back.end(), 0.0);
    for (std::size_t i = 0; i < x.cols(); ++i) {
      back[i] = kern::dot(map.embed.data() + i * k, z.data(), k);
    }
    for (std::size_t i = 0; i < x.cols(); ++i) {
      const double d = back[i] - row[i];
      loss += d * d;
    }
  }
  return loss;
}

}  // namespace hops
