#include "hops/normalize.hpp"

#include <limits>

#include "hops/error.hpp"

namespace hops {
namespace {

MinMaxNormalizer fit_impl(const Matrix& x, const std::size_t* rows, std::size_t count) {
  if ((rows ? count : x.rows()) == 0) {
    throw DimensionError("normalize.empty", "cannot fit a normalizer on zero rows");
  }
  MinMaxNormalizer nz;
  nz.col_min.assign(x.cols(), std::numeric_limits<double>::infinity());
  nz.col_max.assign(x.cols(), -std::numeric_limits<double>::infinity());
  const std::size_t total = rows ? count : x.rows();
  for (std::size_t i = 0; i < total; ++i) {
    auto row = x.row(rows ? rows[i] : i);
    for (std::size_t c = 0; c < x.cols(); ++c) {
      nz.col_min[c] = std::min(nz.col_min[c], row[c]);
      nz.col_max[c] = std::max(nz.col_max[c], row[c]);
    }
  }
  return nz;
}

}  // namespace

MinMaxNormalizer MinMaxNormalizer::fit(const Matrix& x) { return fit_impl(x, nullptr, 0); }

MinMaxNormalizer MinMaxNormalizer::fit_rows(const Matrix& x,
                                            std::span<const std::size_t> rows) {
  return fit_impl(x, rows.data(), rows.size());
}

Matrix MinMaxNormalizer::apply(const Matrix& x) const {
  if (x.cols() != cols()) {
    throw DimensionError("normalize.dims", "normalizer fitted on a different width");
  }
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) apply_row(x.row(r), out.row(r));
  return out;
}

void MinMaxNormalizer::apply_row(std::span<const double> in, std::span<double> out) const {
  if (in.size() != cols() || out.size() != cols()) {
    throw DimensionError("normalize.dims", "normalizer fitted on a different width");
  }
  for (std::size_t c = 0; c < cols(); ++c) {
    const double range = col_max[c] - col_min[c];
    out[c] = range > 0.0 ? (in[c] - col_min[c]) / range : 0.0;
  }
}

}  // namespace hops
