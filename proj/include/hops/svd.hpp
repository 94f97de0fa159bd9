#pragma once

#include <span>
#include <vector>

#include "hops/eigen_sym.hpp"
#include "hops/matrix.hpp"

namespace hops {

// Floor on the relative singular-value cutoff of the pseudo-inverse. The
// working cutoff is max(kSingularCutoff, sqrt(16 n eps)): the Gram route
// reports exact-zero singular values at roughly sqrt(eps) * sigma_1, so a
// dimension-scaled tolerance is required to recognize rank deficiency.
inline constexpr double kSingularCutoff = 1e-12;

double rank_cutoff_ratio(std::size_t cols);

struct SvdResult {
  std::vector<double> singular_values;  // min(m, n) values, descending
  Matrix right_vectors;                 // n x min(m, n), orthonormal columns
  Matrix left_vectors;                  // m x rank(), empty unless requested
  std::size_t source_rows = 0;
  std::size_t source_cols = 0;

  // Count of singular values above the relative cutoff.
  std::size_t rank() const;
  // U diag(S) V^T over the numerical rank; requires left vectors.
  Matrix reconstruct() const;
};

// Thin SVD via symmetric eigendecomposition of the Gram matrix X^T X.
// Deterministic: identical input bits give identical output bits.
SvdResult thin_svd(const Matrix& x, bool want_left = false);

// Minimum-norm least-squares solution of A w ~= y through the SVD
// pseudo-inverse with the relative singular-value cutoff.
std::vector<double> lstsq_minnorm(const Matrix& a, std::span<const double> y);

// Same solve when G = A^T A has been eigendecomposed already and t = A^T y;
// used by grid searches that share one factorization across column subsets.
std::vector<double> lstsq_from_gram(const SymmetricEigen& gram_eig,
                                    std::span<const double> at_y);

}  // namespace hops
