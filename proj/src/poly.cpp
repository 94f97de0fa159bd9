#include "hops/poly.hpp"

#include <cmath>
#include <string>

#include "hops/error.hpp"
#include "hops/kernels.hpp"

namespace hops {
namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

// x with the trend column removed when the spec designates one.
void strip_trend(const PolySpec& spec, std::span<const double> x, std::vector<double>& out) {
  if (!spec.trend_column) {
    out.assign(x.begin(), x.end());
    return;
  }
  out.clear();
  out.reserve(x.size() - 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i != *spec.trend_column) out.push_back(x[i]);
  }
}

}  // namespace

void PolySpec::validate() const {
  if (max_order < 1) throw ConfigError("poly.order", "polynomial order must be >= 1");
  if (embed_dims.size() != max_order) {
    throw ConfigError("poly.embed_dims", "need one embedding dimension per order");
  }
  if (embed_dims[0] != input_dim) {
    throw ConfigError("poly.k1", "order-1 term must keep the full feature dimension");
  }
  const std::size_t source = higher_order_source_dims();
  for (std::size_t i = 2; i <= max_order; ++i) {
    if (embed_dims[i - 1] > source) {
      throw ConfigError("poly.embed_dims",
                        "k_" + std::to_string(i) + " exceeds the reduced feature width " +
                            std::to_string(source));
    }
  }
  if (trend_column && *trend_column >= input_dim) {
    throw ConfigError("poly.trend", "trend column index out of range");
  }
  if (!lambda.empty() && lambda.size() != max_order + 1) {
    throw ConfigError("poly.lambda", "need one l2 weight per order 0..d");
  }
  for (double l : lambda) {
    if (l < 0.0 || !std::isfinite(l)) throw ConfigError("poly.lambda", "l2 weights must be finite and >= 0");
  }
}

std::size_t PolySpec::higher_order_source_dims() const {
  return trend_column ? input_dim - 1 : input_dim;
}

double PolySpec::lambda_for(std::size_t order) const {
  return lambda.empty() ? 0.0 : lambda[order];
}

std::size_t PolySpec::param_count() const {
  std::size_t total = 1;
  for (std::size_t i = 1; i <= max_order; ++i) total += ipow(embed_dims[i - 1], i);
  return total;
}

std::size_t param_count(const PolySpec& spec) { return spec.param_count(); }

double contract_power(std::span<const double> tensor, std::size_t order,
                      std::span<const double> z, std::vector<double>& scratch) {
  const std::size_t k = z.size();
  if (order == 0) return tensor.empty() ? 0.0 : tensor[0];
  if (tensor.size() != ipow(k, order)) {
    throw DimensionError("poly.contract", "tensor size does not match k^order");
  }
  if (order == 1) return kern::dot(tensor.data(), z.data(), k);

  // first contraction: k^order -> k^(order-1)
  std::size_t width = ipow(k, order - 1);
  scratch.resize(width);
  for (std::size_t j = 0; j < width; ++j) {
    scratch[j] = kern::dot(tensor.data() + j * k, z.data(), k);
  }
  // fold the remaining axes in place
  for (std::size_t level = order - 1; level >= 2; --level) {
    width /= k;
    for (std::size_t j = 0; j < width; ++j) {
      scratch[j] = kern::dot(scratch.data() + j * k, z.data(), k);
    }
  }
  return kern::dot(scratch.data(), z.data(), k);
}

double PolyModel::evaluate(std::span<const double> x) const {
  if (x.size() != spec.input_dim) {
    throw DimensionError("poly.evaluate", "feature vector length does not match model");
  }
  double acc = bias;
  if (!tensors.empty() && !tensors[0].empty()) {
    acc += kern::dot(tensors[0].data(), x.data(), x.size());
  }
  if (spec.max_order >= 2) {
    std::vector<double> stripped;
    std::vector<double> z;
    std::vector<double> scratch;
    strip_trend(spec, x, stripped);
    for (std::size_t order = 2; order <= spec.max_order; ++order) {
      const std::size_t k = spec.embed_dim(order);
      if (k == 0) continue;
      const ReductionMap& map = reductions[order - 2];
      if (map.source_dims != stripped.size() || map.target_dim != k) {
        throw DimensionError("poly.evaluate", "reduction map does not match spec");
      }
      z.assign(k, 0.0);
      for (std::size_t i = 0; i < stripped.size(); ++i) {
        if (stripped[i] != 0.0) {
          kern::axpy(stripped[i], map.embed.data() + i * k, z.data(), k);
        }
      }
      acc += contract_power(tensors[order - 1], order, z, scratch);
    }
  }
  return acc;
}

std::vector<double> PolyModel::evaluate_batch(const Matrix& x) const {
  if (x.cols() != spec.input_dim) {
    throw DimensionError("poly.evaluate", "design matrix width does not match model");
  }
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = evaluate(x.row(r));
  return out;
}

double PolyModel::loss(const Matrix& x, std::span<const double> y) const {
  if (x.rows() != y.size()) {
    throw DimensionError("poly.loss", "row count does not match label count");
  }
  std::vector<double> yhat = evaluate_batch(x);
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = yhat[i] - y[i];
    acc += d * d;
  }
  acc += spec.lambda_for(0) * bias * bias;
  for (std::size_t order = 1; order <= spec.max_order; ++order) {
    const double l = spec.lambda_for(order);
    if (l > 0.0 && !tensors[order - 1].empty()) {
      acc += l * kern::sum_sq(tensors[order - 1].data(), tensors[order - 1].size());
    }
  }
  return acc;
}

}  // namespace hops
