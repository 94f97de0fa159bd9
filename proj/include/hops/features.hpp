#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hops/matrix.hpp"
#include "hops/records.hpp"

namespace hops {

// Relative humidity (percent, clamped to [0, 100]) from drybulb and dew point
// temperatures in deg F, via the Tetens saturation-pressure formula.
double relative_humidity(double drybulb_f, double dewpoint_f);

// How temperature enters the design, per temperature channel:
//   raw_powers:      T, T^2, T^3                                  (3 columns)
//   crossed_powers:  T^k x H (24 each), T^k x M (12 each), k=1..3 (108 columns)
//   raw_and_crossed: both                                         (111 columns)
enum class TempStyle { none, raw_powers, crossed_powers, raw_and_crossed };

// raw_powers: RH, RH^2, RH^3. summer_interactions: the RHS block
// (RHS, RHS^2, T x RHS, T^2 x RHS, T x RHS^2, T^2 x RHS^2, H x RHS, H x RHS^2)
// where RHS = RH x [June..September].
enum class HumidityStyle { none, raw_powers, summer_interactions };

// One temperature series: the concurrent reading (lag 0), a lagged reading, or
// a d-day daily moving average.
struct TempChannel {
  std::size_t lag_hours = 0;
  std::size_t movavg_days = 0;  // > 0 selects the moving average
  std::size_t history() const { return movavg_days > 0 ? movavg_days * 24 : lag_hours; }
};

struct VariableSpec {
  std::string name;
  bool trend = false;
  bool hour_dummies = false;
  bool week_dummies = false;
  bool month_dummies = false;
  bool hour_week_cross = false;
  TempStyle temp_style = TempStyle::none;
  std::vector<TempChannel> channels;
  HumidityStyle humidity = HumidityStyle::none;
  std::size_t declared_columns = 0;  // consistency-checked when nonzero
  std::size_t recency_h = 0;         // set by recency/rehops constructors
  std::size_t recency_d = 0;

  std::size_t column_count() const;
  std::size_t history_hours() const;
  bool has_trend() const { return trend; }
  std::size_t trend_column_index() const { return 0; }  // trend is always first

  // HOPS47, HOPS50, HOPS59, G1, H1, G2, H2
  static VariableSpec named(std::string_view name);
  static const std::vector<std::string>& known_names();
  // the literal lagged/moving-average regression variables (with cross terms)
  static VariableSpec recency(std::size_t h, std::size_t d);
  // lagged/moving-average temperature powers without cross terms
  static VariableSpec rehops(std::size_t h, std::size_t d);
  // round-trips a spec stored in a model file
  static VariableSpec from_key(const std::string& name, std::size_t h, std::size_t d);
};

// Raw (unnormalized) design matrix with named columns and row-aligned
// timestamps. Rows lacking lag history are dropped from the head only.
struct DesignMatrix {
  Matrix x;
  std::vector<std::string> columns;
  std::vector<Timestamp> stamps;
  std::vector<std::optional<double>> load;
  std::size_t dropped_head = 0;
  std::vector<std::string> warnings;
  std::optional<std::size_t> trend_column;

  std::size_t column_index(std::string_view name) const;
};

// One-hot calendar block {Trend, H(24), W(7, Monday first), M(12)}.
DesignMatrix calendar_features(std::span<const Timestamp> stamps);

// Lag columns T_{t-1..h} and moving averages over days 1..d, each raised to
// powers 1..powers.
DesignMatrix recency_columns(std::span<const HourlyRecord> records, std::size_t h,
                             std::size_t d, int powers = 1);

DesignMatrix build_design_matrix(std::span<const HourlyRecord> records,
                                 const VariableSpec& spec);

void write_design_csv(const DesignMatrix& design, std::ostream& os);

}  // namespace hops
