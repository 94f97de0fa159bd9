#pragma once

#include <cstddef>

#include "hops/matrix.hpp"
#include "hops/svd.hpp"

namespace hops {

enum class LeakageGuard { off, warn, strict };

// Linear embedding L (source_dims x target_dim) fitted from a training
// feature matrix; columns are the leading right singular vectors, so
// X L L^T is the best rank-k Frobenius approximation of the training data.
struct ReductionMap {
  Matrix embed;
  std::size_t source_dims = 0;
  std::size_t target_dim = 0;
  Fingerprint fitted_on;  // what the map was fitted on (leakage guard)

  // Wraps an arbitrary embedding matrix; no orthonormality requirement.
  static ReductionMap raw(Matrix l);
};

ReductionMap fit_reduction(const Matrix& x_train, std::size_t k);

// Reuses an existing decomposition of the training matrix; equivalent to
// fit_reduction(x_train, k) when svd = thin_svd(x_train).
ReductionMap reduction_from_svd(const SvdResult& svd, std::size_t k,
                                Fingerprint fitted_on);

// X * L. The guard flags applying a map to the very matrix it was fitted on
// when the caller declares the data out-of-sample: warn emits a warning,
// strict throws.
Matrix apply_reduction(const Matrix& x, const ReductionMap& map,
                       LeakageGuard guard = LeakageGuard::off);

// ||X L L^T - X||_F^2
double reconstruction_loss(const Matrix& x, const ReductionMap& map);

}  // namespace hops
