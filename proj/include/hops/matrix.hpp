#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hops/util.hpp"

namespace hops {

// Dense row-major matrix of 64-bit floats. Construction from external data
// validates that every entry is finite.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);  // zero-filled
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  const std::vector<double>& storage() const noexcept { return data_; }

  Matrix transposed() const;
  Matrix select_columns(std::span<const std::size_t> idx) const;
  Matrix select_rows(std::size_t row_begin, std::size_t row_end) const;
  Matrix drop_column(std::size_t col) const;

  double frobenius_norm() const;
  bool all_finite() const;
  Fingerprint fingerprint() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Span-based vector helpers over the active kernel table.
double dot(std::span<const double> a, std::span<const double> b);
double norm_sq(std::span<const double> x);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scal(double alpha, std::span<double> x);
bool all_finite(std::span<const double> x);

}  // namespace hops
