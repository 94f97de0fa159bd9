#pragma once

#include <vector>

#include "hops/matrix.hpp"

namespace hops {

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Matrix vectors;              // columns are the matching orthonormal eigenvectors
};

// Eigendecomposition of a real symmetric matrix (lower triangle is read).
// Householder tridiagonalization followed by implicit-shift QL; deterministic,
// with a fixed sign convention on the eigenvectors. Throws NumericalError if
// the QL iteration fails to converge.
SymmetricEigen eigen_sym(const Matrix& a);

}  // namespace hops
