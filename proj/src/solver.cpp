#include "hops/solver.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "hops/error.hpp"
#include "hops/kernels.hpp"
#include "hops/linalg.hpp"

namespace hops {
namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

// t += coef * z^(outer order); recurses over leading axes, innermost axis is
// one contiguous axpy.
void add_outer_power(double* t, std::span<const double> z, std::size_t order,
                     double coef) {
  const std::size_t k = z.size();
  if (order == 1) {
    kern::axpy(coef, z.data(), t, k);
    return;
  }
  const std::size_t stride = ipow(k, order - 1);
  for (std::size_t a = 0; a < k; ++a) {
    add_outer_power(t + a * stride, z, order - 1, coef * z[a]);
  }
}

// Blocked sum of squares of (yhat - y); fixed block size keeps the reduction
// order independent of how the loop is executed.
double residual_sum_sq(std::span<const double> yhat, std::span<const double> y) {
  constexpr std::size_t kBlock = 2048;
  double total = 0.0;
  for (std::size_t b = 0; b < yhat.size(); b += kBlock) {
    const std::size_t e = std::min(yhat.size(), b + kBlock);
    double part = 0.0;
    for (std::size_t i = b; i < e; ++i) {
      const double d = y.empty() ? yhat[i] : yhat[i] - y[i];
      part += d * d;
    }
    total += part;
  }
  return total;
}

}  // namespace

void SolverTrace::write_csv(std::ostream& os) const {
  os << "iteration,loss,alpha,beta,grad_norm\n";
  char buf[128];
  for (std::size_t i = 0; i < loss.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,", i, loss[i], alpha[i]);
    os << buf;
    if (std::isnan(beta[i])) {
      os << ',';
    } else {
      std::snprintf(buf, sizeof(buf), "%.17g,", beta[i]);
      os << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g\n", grad_norm[i]);
    os << buf;
  }
}

PolyProblem::PolyProblem(const Matrix& x, std::span<const double> y, PolySpec spec,
                         std::vector<ReductionMap> reductions)
    : x_(&x), y_(y), spec_(std::move(spec)), reductions_(std::move(reductions)) {
  spec_.validate();
  if (x.cols() != spec_.input_dim) {
    throw DimensionError("solver.design", "design width does not match spec");
  }
  if (x.rows() != y.size()) {
    throw DimensionError("solver.labels", "row count does not match label count");
  }
  if (!x.all_finite() || !all_finite(y)) {
    throw NumericalError("solver.non_finite", "training data contains NaN or Inf");
  }

  offsets_.assign(spec_.max_order + 1, 0);
  widths_.assign(spec_.max_order + 1, 0);
  offsets_[0] = 0;
  widths_[0] = 1;
  std::size_t cursor = 1;
  for (std::size_t order = 1; order <= spec_.max_order; ++order) {
    offsets_[order] = cursor;
    widths_[order] = ipow(spec_.embed_dim(order), order);
    cursor += widths_[order];
  }
  total_params_ = cursor;

  if (spec_.max_order >= 2) {
    if (reductions_.size() != spec_.max_order - 1) {
      throw DimensionError("solver.reductions", "need one reduction map per order >= 2");
    }
    Matrix stripped =
        spec_.trend_column ? x.drop_column(*spec_.trend_column) : x;
    reduced_.reserve(spec_.max_order - 1);
    for (std::size_t order = 2; order <= spec_.max_order; ++order) {
      const std::size_t k = spec_.embed_dim(order);
      const ReductionMap& map = reductions_[order - 2];
      if (k == 0) {
        reduced_.emplace_back();
        continue;
      }
      if (map.source_dims != stripped.cols() || map.target_dim != k) {
        throw DimensionError("solver.reductions",
                             "reduction map for order " + std::to_string(order) +
                                 " does not match the reduced feature width");
      }
      reduced_.push_back(matmul(stripped, map.embed));
    }
  }
}

void PolyProblem::predict(std::span<const double> theta, std::span<double> yhat) const {
  const std::size_t m = x_->rows();
  const std::size_t n = x_->cols();
  const double bias = theta[0];
  const double* w1 = theta.data() + offsets_[1];
  const auto& k = kern::ops();
  for (std::size_t p = 0; p < m; ++p) {
    yhat[p] = bias + k.dot(w1, x_->data() + p * n, n);
  }
  std::vector<double> scratch;
  for (std::size_t order = 2; order <= spec_.max_order; ++order) {
    const std::size_t kw = spec_.embed_dim(order);
    if (kw == 0) continue;
    const Matrix& z = reduced_[order - 2];
    std::span<const double> t{theta.data() + offsets_[order], widths_[order]};
    for (std::size_t p = 0; p < m; ++p) {
      yhat[p] += contract_power(t, order, z.row(p), scratch);
    }
  }
}

double PolyProblem::loss_value(std::span<const double> theta) const {
  std::vector<double> yhat(samples());
  predict(theta, yhat);
  double acc = residual_sum_sq(yhat, y_);
  for (std::size_t order = 0; order <= spec_.max_order; ++order) {
    const double l = spec_.lambda_for(order);
    if (l > 0.0 && widths_[order] > 0) {
      acc += l * kern::sum_sq(theta.data() + offsets_[order], widths_[order]);
    }
  }
  return acc;
}

void PolyProblem::gradient(std::span<const double> theta, std::span<double> grad) const {
  std::vector<double> resid(samples());
  predict(theta, resid);
  for (std::size_t p = 0; p < samples(); ++p) resid[p] -= y_[p];
  gradient_from_residuals(resid, theta, grad);
}

void PolyProblem::gradient_from_residuals(std::span<const double> resid,
                                          std::span<const double> theta,
                                          std::span<double> grad) const {
  const std::size_t m = x_->rows();
  const std::size_t n = x_->cols();
  std::fill(grad.begin(), grad.end(), 0.0);
  constexpr std::size_t kBlock = 2048;
  double g0 = 0.0;
  for (std::size_t b = 0; b < m; b += kBlock) {
    const std::size_t e = std::min(m, b + kBlock);
    double part = 0.0;
    for (std::size_t p = b; p < e; ++p) part += resid[p];
    g0 += part;
  }
  grad[0] = 2.0 * g0;

  double* g1 = grad.data() + offsets_[1];
  const auto& k = kern::ops();
  for (std::size_t p = 0; p < m; ++p) {
    k.axpy(2.0 * resid[p], x_->data() + p * n, g1, n);
  }
  for (std::size_t order = 2; order <= spec_.max_order; ++order) {
    const std::size_t kw = spec_.embed_dim(order);
    if (kw == 0) continue;
    const Matrix& z = reduced_[order - 2];
    double* gt = grad.data() + offsets_[order];
    for (std::size_t p = 0; p < m; ++p) {
      add_outer_power(gt, z.row(p), order, 2.0 * resid[p]);
    }
  }
  for (std::size_t order = 0; order <= spec_.max_order; ++order) {
    const double l = spec_.lambda_for(order);
    if (l > 0.0 && widths_[order] > 0) {
      k.axpy(2.0 * l, theta.data() + offsets_[order], grad.data() + offsets_[order],
             widths_[order]);
    }
  }
}

double PolyProblem::direction_energy(std::span<const double> dir) const {
  std::vector<double> f(samples());
  predict(dir, f);
  double acc = residual_sum_sq(f, {});
  for (std::size_t order = 0; order <= spec_.max_order; ++order) {
    const double l = spec_.lambda_for(order);
    if (l > 0.0 && widths_[order] > 0) {
      acc += l * kern::sum_sq(dir.data() + offsets_[order], widths_[order]);
    }
  }
  return acc;
}

PolyModel PolyProblem::finalize(std::span<const double> theta,
                                MinMaxNormalizer normalizer) const {
  PolyModel model;
  model.spec = spec_;
  model.bias = theta[0];
  model.tensors.resize(spec_.max_order);
  for (std::size_t order = 1; order <= spec_.max_order; ++order) {
    const double* t = theta.data() + offsets_[order];
    model.tensors[order - 1].assign(t, t + widths_[order]);
  }
  model.reductions = reductions_;
  model.normalizer = std::move(normalizer);
  return model;
}

std::optional<double> step_size(const PolyProblem& problem,
                                std::span<const double> direction,
                                double numerator_norm_sq) {
  const double denom = 2.0 * problem.direction_energy(direction);
  if (denom == 0.0) return std::nullopt;
  return numerator_norm_sq / denom;
}

std::pair<PolyModel, SolverTrace> fit_polycg(const Matrix& x_normalized,
                                             std::span<const double> y,
                                             const PolySpec& spec,
                                             std::vector<ReductionMap> reductions,
                                             const SolverConfig& config,
                                             MinMaxNormalizer normalizer) {
  if (config.max_iter < 1) throw ConfigError("solver.max_iter", "max_iter must be >= 1");
  if (!(config.tolerance > 0.0)) {
    throw ConfigError("solver.tolerance", "tolerance must be > 0");
  }
  PolyProblem problem(x_normalized, y, spec, std::move(reductions));
  const std::size_t np = problem.n_params();
  const std::size_t m = problem.samples();

  std::vector<double> theta(np, 0.0);  // zero initialization: deterministic
  std::vector<double> grad(np, 0.0);
  std::vector<double> dir(np, 0.0);
  std::vector<double> resid(m, 0.0);

  SolverTrace trace;
  trace.initial_loss = problem.loss_value(theta);
  double loss_prev = trace.initial_loss;

  problem.gradient(theta, grad);
  double grad_norm_sq = norm_sq(grad);
  for (std::size_t i = 0; i < np; ++i) dir[i] = -grad[i];

  const double nan = std::numeric_limits<double>::quiet_NaN();
  trace.stop_reason = StopReason::max_iter;

  for (std::size_t iter = 0; iter < config.max_iter; ++iter) {
    // In residual mode both sides of the ratio use the residual tensors
    // verbatim. Exact mode minimizes the quadratic along P, whose numerator
    // -<R, P> coincides with |R|^2 under exact conjugacy (and bit-exactly at
    // iteration 0) but stays a true line minimum once rounding breaks the
    // conjugacy, keeping the descent monotone.
    const bool residual_mode = config.alpha_mode == AlphaMode::residual;
    std::span<const double> denom_dir = residual_mode ? std::span<const double>(grad)
                                                      : std::span<const double>(dir);
    const double numerator = residual_mode ? grad_norm_sq : -dot(grad, dir);
    std::optional<double> alpha = step_size(problem, denom_dir, numerator);
    if (!alpha) {  // direction annihilated by the design: converged
      trace.stop_reason = StopReason::tolerance;
      break;
    }
    if (!std::isfinite(*alpha)) {
      throw SolverDivergence("step size became non-finite at iteration " +
                                 std::to_string(iter),
                             trace);
    }
    axpy(*alpha, dir, theta);
    problem.predict(theta, resid);
    double loss_new = 0.0;
    {
      constexpr std::size_t kBlock = 2048;
      for (std::size_t b = 0; b < m; b += kBlock) {
        const std::size_t e = std::min(m, b + kBlock);
        double part = 0.0;
        for (std::size_t p = b; p < e; ++p) {
          resid[p] -= y[p];
          part += resid[p] * resid[p];
        }
        loss_new += part;
      }
      for (std::size_t order = 0; order <= problem.spec().max_order; ++order) {
        const double l = problem.spec().lambda_for(order);
        if (l > 0.0 && problem.order_width(order) > 0) {
          loss_new += l * kern::sum_sq(theta.data() + problem.order_offset(order),
                                       problem.order_width(order));
        }
      }
    }
    if (!std::isfinite(loss_new)) {
      throw SolverDivergence("loss became non-finite at iteration " +
                                 std::to_string(iter),
                             trace);
    }
    if (config.record_trace) {
      trace.loss.push_back(loss_new);
      trace.alpha.push_back(*alpha);
      trace.beta.push_back(nan);
      trace.grad_norm.push_back(std::sqrt(grad_norm_sq));
    }

    if (loss_prev == 0.0 ||
        std::abs(loss_new - loss_prev) / loss_prev <= config.tolerance) {
      trace.stop_reason = StopReason::tolerance;
      break;
    }
    loss_prev = loss_new;
    if (iter + 1 == config.max_iter) break;  // max_iter; skip the unused gradient

    problem.gradient_from_residuals(resid, theta, grad);
    const double grad_norm_sq_next = norm_sq(grad);
    if (!std::isfinite(grad_norm_sq_next)) {
      throw SolverDivergence("gradient became non-finite at iteration " +
                                 std::to_string(iter),
                             trace);
    }
    const double beta = grad_norm_sq_next / grad_norm_sq;
    if (config.record_trace) trace.beta.back() = beta;
    // P <- -R + beta P
    scal(beta, dir);
    axpy(-1.0, grad, dir);
    grad_norm_sq = grad_norm_sq_next;
  }

  return {problem.finalize(theta, std::move(normalizer)), std::move(trace)};
}

}  // namespace hops
