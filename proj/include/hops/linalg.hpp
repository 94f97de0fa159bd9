#pragma once

#include <span>

#include "hops/matrix.hpp"

namespace hops {

// y = A x
void gemv(const Matrix& a, std::span<const double> x, std::span<double> y);
// y = A^T x
void gemv_transposed(const Matrix& a, std::span<const double> x, std::span<double> y);

Matrix matmul(const Matrix& a, const Matrix& b);

// X^T X, exploiting symmetry; row-blocked so the accumulator stays cache-hot.
Matrix gram(const Matrix& x);

}  // namespace hops
