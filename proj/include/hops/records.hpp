#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>

namespace hops {

// Local calendar date plus hour-ending index 1..24.
struct Timestamp {
  int year = 0;
  unsigned month = 1;
  unsigned day = 1;
  unsigned hour = 1;  // hour-ending, 1..24

  std::chrono::sys_days date() const {
    return std::chrono::sys_days{std::chrono::year{year} / std::chrono::month{month} /
                                 std::chrono::day{day}};
  }
  bool valid_date() const {
    return std::chrono::year_month_day{std::chrono::year{year} / std::chrono::month{month} /
                                       std::chrono::day{day}}
        .ok();
  }
  // absolute hour counter; consecutive hourly records differ by exactly 1
  long long hour_index() const {
    return static_cast<long long>(date().time_since_epoch().count()) * 24 +
           static_cast<long long>(hour) - 1;
  }
  int weekday_mon0() const {
    return static_cast<int>(std::chrono::weekday{date()}.iso_encoding()) - 1;
  }
  std::string to_string() const;

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

struct HourlyRecord {
  Timestamp ts;
  std::optional<double> load;  // MW; absent on forecast rows
  double drybulb = 0.0;        // deg F
  double dewpoint = 0.0;       // deg F
  std::string zone;
};

}  // namespace hops
