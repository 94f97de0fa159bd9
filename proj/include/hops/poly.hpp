#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hops/matrix.hpp"
#include "hops/normalize.hpp"
#include "hops/reduction.hpp"

namespace hops {

// Shape of an embedded polynomial: order-1 term always runs on the full
// feature vector (k_1 = n); each higher order i contracts a dense k_i^i
// coefficient tensor against the embedded vector. k_i = 0 removes order i.
// When a trend column is designated it participates in order 1 only and is
// dropped before the higher-order embeddings.
struct PolySpec {
  std::size_t input_dim = 0;
  std::size_t max_order = 1;
  std::vector<std::size_t> embed_dims;       // k_1 .. k_d
  std::optional<std::size_t> trend_column;
  std::vector<double> lambda;                // l2 weights per order 0..d, default 0

  void validate() const;
  std::size_t higher_order_source_dims() const;  // n, or n-1 with a trend column
  std::size_t embed_dim(std::size_t order) const { return embed_dims[order - 1]; }
  double lambda_for(std::size_t order) const;
  // 1 + sum_i k_i^i
  std::size_t param_count() const;
};

std::size_t param_count(const PolySpec& spec);

struct PolyModel {
  PolySpec spec;
  double bias = 0.0;                          // order-0 coefficient
  std::vector<std::vector<double>> tensors;   // tensors[i-1] is the order-i tensor, k_i^i entries
  std::vector<ReductionMap> reductions;       // reductions[i-2] serves order i >= 2
  MinMaxNormalizer normalizer;                // fitted scaling for raw inputs

  // x is an already-normalized feature vector of length n.
  double evaluate(std::span<const double> x) const;
  std::vector<double> evaluate_batch(const Matrix& x) const;
  // sum of squared errors plus the l2 penalty
  double loss(const Matrix& x, std::span<const double> y) const;
};

// Contracts an order-`order` tensor (k^order entries) with z along the last
// axis repeatedly until a scalar remains; never materializes the outer-product
// feature tensor. scratch must have at least k^(order-1) capacity.
double contract_power(std::span<const double> tensor, std::size_t order,
                      std::span<const double> z, std::vector<double>& scratch);

}  // namespace hops
