#include "hops/benchmarks.hpp"

#include <algorithm>
#include <cmath>

#include "hops/error.hpp"
#include "hops/kernels.hpp"
#include "hops/linalg.hpp"
#include "hops/metrics.hpp"
#include "hops/svd.hpp"
#include "hops/util.hpp"

namespace hops {
namespace {

std::vector<std::size_t> rows_in_years(const DesignMatrix& design, YearSpan years,
                                       bool require_load) {
  std::vector<std::size_t> idx;
  for (std::size_t r = 0; r < design.stamps.size(); ++r) {
    if (!years.contains(design.stamps[r].year)) continue;
    if (require_load && !design.load[r]) continue;
    idx.push_back(r);
  }
  return idx;
}

std::vector<double> loads_at(const DesignMatrix& design, std::span<const std::size_t> idx) {
  std::vector<double> y;
  y.reserve(idx.size());
  for (std::size_t r : idx) y.push_back(*design.load[r]);
  return y;
}

Matrix gather_normalized(const Matrix& x, std::span<const std::size_t> idx,
                         const MinMaxNormalizer& nz) {
  Matrix out(idx.size(), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) nz.apply_row(x.row(idx[i]), out.row(i));
  return out;
}

}  // namespace

std::vector<double> PredictionSet::actual_values() const {
  std::vector<double> y;
  y.reserve(actual.size());
  for (const auto& a : actual) {
    if (!a) {
      throw DataError("benchmarks.missing_actual",
                      "actual load missing for a scored timestamp");
    }
    y.push_back(*a);
  }
  return y;
}

LinearModel fit_linear(std::span<const HourlyRecord> records, const VariableSpec& spec,
                       YearSpan train_years) {
  DesignMatrix design = build_design_matrix(records, spec);
  std::vector<std::size_t> train_idx = rows_in_years(design, train_years, true);
  if (train_idx.empty()) {
    throw DataError("benchmarks.no_training_rows", "no training rows in the given years");
  }
  MinMaxNormalizer nz = MinMaxNormalizer::fit_rows(design.x, train_idx);
  Matrix xn = gather_normalized(design.x, train_idx, nz);
  std::vector<double> y = loads_at(design, train_idx);

  // design with the explicit intercept column prepended
  Matrix a(xn.rows(), xn.cols() + 1);
  for (std::size_t r = 0; r < xn.rows(); ++r) {
    a(r, 0) = 1.0;
    auto src = xn.row(r);
    std::copy(src.begin(), src.end(), a.row(r).begin() + 1);
  }
  LinearModel model;
  model.spec = spec;
  model.coefficients = lstsq_minnorm(a, y);
  model.normalizer = std::move(nz);
  return model;
}

PredictionSet predict_linear(const LinearModel& model,
                             std::span<const HourlyRecord> records,
                             YearSpan target_years) {
  DesignMatrix design = build_design_matrix(records, model.spec);
  std::vector<std::size_t> idx = rows_in_years(design, target_years, false);
  PredictionSet out;
  out.stamps.reserve(idx.size());
  out.predicted.reserve(idx.size());
  out.actual.reserve(idx.size());
  std::vector<double> row(design.x.cols());
  for (std::size_t r : idx) {
    model.normalizer.apply_row(design.x.row(r), row);
    double yhat = model.coefficients[0] +
                  kern::dot(model.coefficients.data() + 1, row.data(), row.size());
    out.stamps.push_back(design.stamps[r]);
    out.predicted.push_back(yhat);
    out.actual.push_back(design.load[r]);
  }
  return out;
}

RecencyFit fit_recency(std::span<const HourlyRecord> records,
                       std::span<const std::size_t> h_range,
                       std::span<const std::size_t> d_range,
                       const RecencyProtocol& protocol) {
  if (h_range.empty() || d_range.empty()) {
    throw ConfigError("benchmarks.recency_range", "empty h or d search range");
  }
  const std::size_t h_max = *std::max_element(h_range.begin(), h_range.end());
  const std::size_t d_max = *std::max_element(d_range.begin(), d_range.end());

  // Build the largest design once; every cell is a column subset of it, so a
  // single Gram matrix and A^T y serve the whole grid.
  VariableSpec full_spec = VariableSpec::recency(h_max, d_max);
  std::size_t end = records.size();
  while (end > 0 && records[end - 1].ts.year > protocol.validation_year) --end;
  DesignMatrix design = build_design_matrix(records.first(end), full_spec);

  std::vector<std::size_t> train_idx = rows_in_years(design, protocol.train, true);
  std::vector<std::size_t> val_idx =
      rows_in_years(design, {protocol.validation_year, protocol.validation_year}, true);
  if (train_idx.empty() || val_idx.empty()) {
    throw DataError("benchmarks.recency_rows", "empty training or validation split");
  }
  MinMaxNormalizer nz = MinMaxNormalizer::fit_rows(design.x, train_idx);
  Matrix xn_train = gather_normalized(design.x, train_idx, nz);
  Matrix xn_val = gather_normalized(design.x, val_idx, nz);
  std::vector<double> y_train = loads_at(design, train_idx);
  std::vector<double> y_val = loads_at(design, val_idx);
  design.x = Matrix();  // raw design no longer needed

  const std::size_t n = xn_train.cols();
  Matrix g_x = gram(xn_train);
  std::vector<double> col_sum(n, 0.0);
  std::vector<double> ones(xn_train.rows(), 1.0);
  gemv_transposed(xn_train, ones, col_sum);
  std::vector<double> xty(n, 0.0);
  gemv_transposed(xn_train, y_train, xty);
  double y_sum = 0.0;
  for (double v : y_train) y_sum += v;

  // Column layout of the full recency design: the calendar block, then one
  // 111-wide block per channel (lags 0..h_max, then moving averages 1..d_max).
  const std::size_t base = 1 + 24 + 7 + 12 + 168;
  const std::size_t chan_width = 111;
  auto cell_columns = [&](std::size_t h, std::size_t d) {
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < base; ++c) cols.push_back(c);
    for (std::size_t i = 0; i <= h; ++i) {
      const std::size_t off = base + i * chan_width;
      for (std::size_t c = 0; c < chan_width; ++c) cols.push_back(off + c);
    }
    for (std::size_t j = 1; j <= d; ++j) {
      const std::size_t off = base + (h_max + j) * chan_width;
      for (std::size_t c = 0; c < chan_width; ++c) cols.push_back(off + c);
    }
    return cols;
  };

  std::vector<RecencyCell> cells;
  for (std::size_t h : h_range) {
    for (std::size_t d : d_range) cells.push_back({h, d, 0.0});
  }

  parallel_for(cells.size(), protocol.threads, [&](std::size_t ci) {
    RecencyCell& cell = cells[ci];
    const auto cols = cell_columns(cell.h, cell.d);
    const std::size_t k = cols.size();
    // Gram of [1 | X_sub] assembled from the shared pieces
    Matrix g(k + 1, k + 1);
    g(0, 0) = static_cast<double>(xn_train.rows());
    for (std::size_t i = 0; i < k; ++i) {
      g(0, i + 1) = col_sum[cols[i]];
      g(i + 1, 0) = col_sum[cols[i]];
      const double* grow = g_x.data() + cols[i] * n;
      for (std::size_t j = 0; j < k; ++j) g(i + 1, j + 1) = grow[cols[j]];
    }
    std::vector<double> t(k + 1);
    t[0] = y_sum;
    for (std::size_t i = 0; i < k; ++i) t[i + 1] = xty[cols[i]];

    std::vector<double> w = lstsq_from_gram(eigen_sym(g), t);

    std::vector<double> yhat(xn_val.rows());
    for (std::size_t r = 0; r < xn_val.rows(); ++r) {
      const double* row = xn_val.data() + r * n;
      double acc = w[0];
      for (std::size_t i = 0; i < k; ++i) acc += w[i + 1] * row[cols[i]];
      yhat[r] = acc;
    }
    cell.validation_mape = mape(y_val, yhat);
  });

  const RecencyCell* best = &cells.front();
  for (const auto& c : cells) {
    const auto key = std::make_tuple(c.validation_mape, c.h, c.d);
    const auto best_key = std::make_tuple(best->validation_mape, best->h, best->d);
    if (key < best_key) best = &c;
  }

  RecencyFit fit;
  fit.h = best->h;
  fit.d = best->d;
  fit.cells = std::move(cells);
  fit.model = fit_linear(records, VariableSpec::recency(fit.h, fit.d), protocol.retrain);
  return fit;
}

}  // namespace hops
