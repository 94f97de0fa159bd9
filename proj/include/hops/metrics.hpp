#pragma once

#include <span>
#include <string>
#include <vector>

#include "hops/records.hpp"

namespace hops {

// Mean absolute percentage error in percent. Zero actuals are an error: load
// data is strictly positive, a zero signals corruption.
double mape(std::span<const double> actual, std::span<const double> predicted);

double mse(std::span<const double> actual, std::span<const double> predicted);

// MAPE over per-day maxima. Days with fewer/more than 24 rows are excluded
// and reported through `warnings` when given.
double daily_peak_mape(std::span<const double> actual, std::span<const double> predicted,
                       std::span<const Timestamp> stamps,
                       std::vector<std::string>* warnings = nullptr);

}  // namespace hops
