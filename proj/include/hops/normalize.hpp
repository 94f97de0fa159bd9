#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hops/matrix.hpp"

namespace hops {

// Per-column Min-Max scaling fitted on training rows. Values outside the
// fitted range map outside [0, 1] (no clamping); constant columns map to 0.
struct MinMaxNormalizer {
  std::vector<double> col_min;
  std::vector<double> col_max;

  static MinMaxNormalizer fit(const Matrix& x);
  static MinMaxNormalizer fit_rows(const Matrix& x, std::span<const std::size_t> rows);

  bool empty() const { return col_min.empty(); }
  std::size_t cols() const { return col_min.size(); }

  Matrix apply(const Matrix& x) const;
  void apply_row(std::span<const double> in, std::span<double> out) const;
};

}  // namespace hops
