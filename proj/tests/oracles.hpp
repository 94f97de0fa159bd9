#pragma once

// Independent reference implementations used only to check the library:
// kept deliberately naive and separate from the production code paths.

#include <span>
#include <vector>

#include "hops/matrix.hpp"
#include "hops/poly.hpp"
#include "hops/solver.hpp"

namespace oracle {

using hops::Matrix;

// One-sided Jacobi SVD (column orthogonalization); singular values descending.
std::vector<double> jacobi_singular_values(const Matrix& x, Matrix* v_out = nullptr);

Matrix random_matrix(std::size_t rows, std::size_t cols, unsigned seed, double lo = -1.0,
                     double hi = 1.0);
std::vector<double> random_vector(std::size_t n, unsigned seed, double lo = -1.0,
                                  double hi = 1.0);
// Gram-Schmidt of a Gaussian sample: n x k with orthonormal columns.
Matrix random_orthonormal(std::size_t n, std::size_t k, unsigned seed);

// Polynomial value by full multi-index enumeration over every tensor entry.
double brute_force_poly(const hops::PolyModel& model, std::span<const double> x);

// Explicit monomial design: [1, x, z2 (x) z2, z3 (x) z3 (x) z3, ...] flattened
// in the same order as the coefficient tensors, so predictions are Phi theta.
Matrix expand_monomials(const Matrix& x_normalized, const hops::PolySpec& spec,
                        const std::vector<hops::ReductionMap>& reductions);

// Dense linear solve by Gaussian elimination with partial pivoting.
std::vector<double> gauss_solve(Matrix a, std::vector<double> b);

}  // namespace oracle
