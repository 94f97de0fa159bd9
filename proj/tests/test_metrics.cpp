#include <vector>

#include <doctest.h>

#include "hops/error.hpp"
#include "hops/metrics.hpp"
#include "oracles.hpp"

using namespace hops;

namespace {

std::vector<Timestamp> day_stamps(unsigned days) {
  std::vector<Timestamp> out;
  for (unsigned d = 1; d <= days; ++d) {
    for (unsigned h = 1; h <= 24; ++h) out.push_back({2015, 1, d, h});
  }
  return out;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("mape") {
  std::vector<double> y{100, 100};
  CHECK(mape(y, y) == doctest::Approx(0.0));
  std::vector<double> yhat{110, 90};
  CHECK(mape(y, yhat) == doctest::Approx(10.0));

  std::vector<double> zero{0.0, 1.0};
  CHECK_THROWS_AS(mape(zero, yhat), DataError);
  CHECK_THROWS_AS(mape(y, std::vector<double>{1.0}), DimensionError);

  // direct-formula recomputation on random data
  auto a = oracle::random_vector(100, 1, 50.0, 150.0);
  auto p = oracle::random_vector(100, 2, 50.0, 150.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs((a[i] - p[i]) / a[i]);
  CHECK(mape(a, p) == doctest::Approx(acc / 100.0 * 100.0).epsilon(1e-12));
}

TEST_CASE("mse") {
  std::vector<double> y{0, 0};
  std::vector<double> yhat{1, 1};
  CHECK(mse(y, y) == doctest::Approx(0.0));
  CHECK(mse(y, yhat) == doctest::Approx(1.0));
  auto a = oracle::random_vector(64, 3);
  auto p = oracle::random_vector(64, 4);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - p[i]) * (a[i] - p[i]);
  CHECK(mse(a, p) == doctest::Approx(acc / 64.0).epsilon(1e-12));
}

TEST_CASE("daily peak mape") {
  auto stamps = day_stamps(2);
  auto y = oracle::random_vector(48, 5, 100.0, 200.0);
  CHECK(daily_peak_mape(y, y, stamps) == doctest::Approx(0.0));

  // shifting predictions by one hour within each day keeps the peaks
  std::vector<double> shifted(48);
  for (std::size_t d = 0; d < 2; ++d) {
    for (std::size_t h = 0; h < 24; ++h) {
      shifted[d * 24 + (h + 1) % 24] = y[d * 24 + h];
    }
  }
  CHECK(daily_peak_mape(y, shifted, stamps) == doctest::Approx(0.0));

  // two-day toy case against a hand computation
  std::vector<double> actual(48, 100.0);
  std::vector<double> pred(48, 100.0);
  actual[7] = 180.0;   // day-1 peak
  pred[9] = 171.0;     // predicted day-1 peak: |180-171|/180 = 5%
  actual[24 + 3] = 200.0;
  pred[24 + 3] = 230.0;  // day-2: |200-230|/200 = 15%
  CHECK(daily_peak_mape(actual, pred, stamps) == doctest::Approx(10.0));

  // incomplete day excluded with a warning
  auto stamps_short = stamps;
  stamps_short.resize(47);
  auto y_short = y;
  y_short.resize(47);
  std::vector<std::string> warnings;
  const double val = daily_peak_mape(y_short, y_short, stamps_short, &warnings);
  CHECK(val == doctest::Approx(0.0));
  CHECK(warnings.size() == 1);
}

}  // TEST_SUITE
