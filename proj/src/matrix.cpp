#include "hops/matrix.hpp"

#include <cmath>
#include <stdexcept>

#include "hops/error.hpp"
#include "hops/kernels.hpp"

namespace hops {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows_ * cols_ != data_.size()) {
    throw DimensionError("matrix.shape",
                         "matrix data length does not match rows*cols");
  }
  if (!all_finite()) {
    throw NumericalError("matrix.non_finite",
                         "matrix constructed with NaN or Inf entries");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  std::size_t cols = rows.front().size();
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) {
      throw DimensionError("matrix.shape", "ragged row list");
    }
    data.insert(data.end(), r.begin(), r.end());
  }
  return Matrix(rows.size(), cols, std::move(data));
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    const double* src = data_.data() + r * cols_;
    for (std::size_t c = 0; c < cols_; ++c) t.data_[c * rows_ + r] = src[c];
  }
  return t;
}

Matrix Matrix::select_columns(std::span<const std::size_t> idx) const {
  Matrix out(rows_, idx.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    const double* src = data_.data() + r * cols_;
    double* dst = out.data_.data() + r * idx.size();
    for (std::size_t j = 0; j < idx.size(); ++j) {
      if (idx[j] >= cols_) throw DimensionError("matrix.column_index", "column index out of range");
      dst[j] = src[idx[j]];
    }
  }
  return out;
}

Matrix Matrix::select_rows(std::size_t row_begin, std::size_t row_end) const {
  if (row_begin > row_end || row_end > rows_) {
    throw DimensionError("matrix.row_range", "row range out of bounds");
  }
  Matrix out(row_end - row_begin, cols_);
  std::copy(data_.begin() + static_cast<std::ptrdiff_t>(row_begin * cols_),
            data_.begin() + static_cast<std::ptrdiff_t>(row_end * cols_),
            out.data_.begin());
  return out;
}

Matrix Matrix::drop_column(std::size_t col) const {
  if (col >= cols_) throw DimensionError("matrix.column_index", "column index out of range");
  Matrix out(rows_, cols_ - 1);
  for (std::size_t r = 0; r < rows_; ++r) {
    const double* src = data_.data() + r * cols_;
    double* dst = out.data_.data() + r * (cols_ - 1);
    std::copy(src, src + col, dst);
    std::copy(src + col + 1, src + cols_, dst + col);
  }
  return out;
}

double Matrix::frobenius_norm() const {
  return std::sqrt(kern::sum_sq(data_.data(), data_.size()));
}

bool Matrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Fingerprint Matrix::fingerprint() const {
  std::uint64_t h = fnv1a64(&rows_, sizeof(rows_));
  h = fnv1a64(&cols_, sizeof(cols_), h);
  h = fnv1a64(data_.data(), data_.size() * sizeof(double), h);
  return {h, rows_};
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("vector.length", "dot of vectors with different lengths");
  }
  return kern::dot(a.data(), b.data(), a.size());
}

double norm_sq(std::span<const double> x) { return kern::sum_sq(x.data(), x.size()); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) {
    throw DimensionError("vector.length", "axpy of vectors with different lengths");
  }
  kern::axpy(alpha, x.data(), y.data(), x.size());
}

void scal(double alpha, std::span<double> x) { kern::scal(alpha, x.data(), x.size()); }

bool all_finite(std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace hops
