#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "hops/error.hpp"
#include "hops/matrix.hpp"
#include "hops/normalize.hpp"
#include "hops/poly.hpp"

namespace hops {

// Step-length rule. `exact` minimizes the quadratic loss along the search
// direction (denominator evaluates the direction polynomial); `residual`
// keeps the verbatim update in which the denominator evaluates the polynomial
// with the residual tensors as coefficients — the two coincide at iteration 0.
enum class AlphaMode { exact, residual };

struct SolverConfig {
  std::size_t max_iter = 1000;
  double tolerance = 1e-7;
  AlphaMode alpha_mode = AlphaMode::exact;
  bool record_trace = true;
};

enum class StopReason { tolerance, max_iter };

struct SolverTrace {
  double initial_loss = 0.0;
  std::vector<double> loss;       // loss after each completed iteration
  std::vector<double> alpha;
  std::vector<double> beta;       // NaN on the final row if never computed
  std::vector<double> grad_norm;  // gradient norm at the start of the iteration
  StopReason stop_reason = StopReason::max_iter;

  std::size_t iterations() const { return loss.size(); }
  void write_csv(std::ostream& os) const;
};

// Thrown when an iterate goes non-finite; carries the trace up to the failure.
struct SolverDivergence : NumericalError {
  SolverDivergence(const std::string& message, SolverTrace t)
      : NumericalError("solver.divergence", message), trace(std::move(t)) {}
  SolverTrace trace;
};

// Fitting problem with precomputed per-order embedded designs. The parameter
// vector theta is the flat concatenation (bias, order-1 tensor, order-2
// tensor, ...); predictions are linear in theta, which is what conjugate
// gradients exploits.
class PolyProblem {
public:
  PolyProblem(const Matrix& x, std::span<const double> y, PolySpec spec,
              std::vector<ReductionMap> reductions);

  std::size_t n_params() const { return total_params_; }
  std::size_t samples() const { return x_->rows(); }
  const PolySpec& spec() const { return spec_; }
  std::size_t order_offset(std::size_t order) const { return offsets_[order]; }
  std::size_t order_width(std::size_t order) const { return widths_[order]; }

  // yhat_p = f_theta(x_p); works for coefficient, residual and direction
  // tensors alike since all share the layout.
  void predict(std::span<const double> theta, std::span<double> yhat) const;
  double loss_value(std::span<const double> theta) const;
  // grad = 2 sum_p (f(x_p) - y_p) phi(x_p) + 2 lambda . theta, laid out like theta
  void gradient(std::span<const double> theta, std::span<double> grad) const;
  // same, reusing residuals already computed for this theta
  void gradient_from_residuals(std::span<const double> resid,
                               std::span<const double> theta,
                               std::span<double> grad) const;
  // sum_p f_dir(x_p)^2 plus the l2 term of the direction
  double direction_energy(std::span<const double> dir) const;

  PolyModel finalize(std::span<const double> theta, MinMaxNormalizer normalizer) const;

private:
  const Matrix* x_;
  std::span<const double> y_;
  PolySpec spec_;
  std::vector<ReductionMap> reductions_;
  std::vector<Matrix> reduced_;  // reduced_[i-2]: embedded design for order i
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> widths_;
  std::size_t total_params_ = 0;
};

// alpha = numerator / (2 * energy(direction)); nullopt signals a zero
// denominator, i.e. the direction is annihilated by the design (converged).
std::optional<double> step_size(const PolyProblem& problem,
                                std::span<const double> direction,
                                double numerator_norm_sq);

std::pair<PolyModel, SolverTrace> fit_polycg(const Matrix& x_normalized,
                                             std::span<const double> y,
                                             const PolySpec& spec,
                                             std::vector<ReductionMap> reductions,
                                             const SolverConfig& config = {},
                                             MinMaxNormalizer normalizer = {});

}  // namespace hops
