#include "hops/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "hops/error.hpp"

namespace hops {
namespace {

void check_lengths(std::span<const double> a, std::span<const double> p) {
  if (a.size() != p.size()) {
    throw DimensionError("metrics.length", "actual and predicted lengths differ");
  }
  if (a.empty()) throw DimensionError("metrics.empty", "no samples to score");
}

}  // namespace

double mape(std::span<const double> actual, std::span<const double> predicted) {
  check_lengths(actual, predicted);
  double acc = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] == 0.0) {
      throw DataError("metrics.zero_actual", "zero actual value in MAPE");
    }
    acc += std::abs((actual[i] - predicted[i]) / actual[i]);
  }
  return acc / static_cast<double>(actual.size()) * 100.0;
}

double mse(std::span<const double> actual, std::span<const double> predicted) {
  check_lengths(actual, predicted);
  double acc = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double d = actual[i] - predicted[i];
    acc += d * d;
  }
  return acc / static_cast<double>(actual.size());
}

double daily_peak_mape(std::span<const double> actual, std::span<const double> predicted,
                       std::span<const Timestamp> stamps,
                       std::vector<std::string>* warnings) {
  check_lengths(actual, predicted);
  if (stamps.size() != actual.size()) {
    throw DimensionError("metrics.length", "timestamps do not align with samples");
  }
  std::vector<double> day_actual;
  std::vector<double> day_predicted;
  std::size_t i = 0;
  while (i < stamps.size()) {
    std::size_t j = i;
    while (j < stamps.size() && stamps[j].date() == stamps[i].date()) ++j;
    if (j - i == 24) {
      double ma = actual[i];
      double mp = predicted[i];
      for (std::size_t t = i + 1; t < j; ++t) {
        ma = std::max(ma, actual[t]);
        mp = std::max(mp, predicted[t]);
      }
      day_actual.push_back(ma);
      day_predicted.push_back(mp);
    } else if (warnings) {
      warnings->push_back("excluded incomplete day " + stamps[i].to_string());
    }
    i = j;
  }
  if (day_actual.empty()) {
    throw DataError("metrics.no_complete_days", "no complete 24-hour days to score");
  }
  return mape(day_actual, day_predicted);
}

}  // namespace hops
