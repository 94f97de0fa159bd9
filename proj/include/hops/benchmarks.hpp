#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hops/features.hpp"
#include "hops/normalize.hpp"
#include "hops/records.hpp"

namespace hops {

struct YearSpan {
  int first = 0;
  int last = 0;
  bool contains(int year) const { return year >= first && year <= last; }
};

// Multiple linear regression over a VariableSpec, fitted by minimum-norm
// least squares (the dummy groups are collinear with the intercept by
// construction; the pseudo-inverse keeps fitted values well defined).
struct LinearModel {
  VariableSpec spec;
  std::vector<double> coefficients;  // intercept first, then one per column
  MinMaxNormalizer normalizer;
};

struct PredictionSet {
  std::vector<Timestamp> stamps;
  std::vector<double> predicted;
  std::vector<std::optional<double>> actual;

  std::vector<double> actual_values() const;  // throws if any actual is absent
};

LinearModel fit_linear(std::span<const HourlyRecord> records, const VariableSpec& spec,
                       YearSpan train_years);

PredictionSet predict_linear(const LinearModel& model,
                             std::span<const HourlyRecord> records, YearSpan target_years);

struct RecencyProtocol {
  YearSpan train{2012, 2013};
  int validation_year = 2014;
  YearSpan retrain{2013, 2014};
  unsigned threads = 1;
};

struct RecencyCell {
  std::size_t h = 0;
  std::size_t d = 0;
  double validation_mape = 0.0;
};

struct RecencyFit {
  LinearModel model;
  std::size_t h = 0;
  std::size_t d = 0;
  std::vector<RecencyCell> cells;
};

// Grid search over lag count h and moving-average days d: fit on the training
// span, score each cell on the validation year, pick the best (ties toward
// smaller h, then smaller d), and refit on the retraining span.
RecencyFit fit_recency(std::span<const HourlyRecord> records,
                       std::span<const std::size_t> h_range,
                       std::span<const std::size_t> d_range,
                       const RecencyProtocol& protocol);

}  // namespace hops
