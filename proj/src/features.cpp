#include "hops/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "hops/error.hpp"

namespace hops {

std::string Timestamp::to_string() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u h%02u", year, month, day, hour);
  return buf;
}

namespace {

double tetens_saturation(double t_celsius) {
  if (t_celsius + 237.3 <= 0.0) {
    throw DataError("features.humidity_range",
                    "temperature below the Tetens formula domain");
  }
  return 6.1078 * std::exp(17.27 * t_celsius / (t_celsius + 237.3));
}

double f_to_c(double f) { return (f - 32.0) * 5.0 / 9.0; }

struct RowCtx {
  double trend = 0.0;
  unsigned hour = 1;
  int weekday = 0;
  unsigned month = 1;
  double concurrent_temp = 0.0;
  double rh = 0.0;
  bool summer = false;
  std::vector<double> temp;  // per channel
};

struct Column {
  std::string name;
  std::function<double(const RowCtx&)> fn;
};

std::string pow_base(int k) { return k == 1 ? "T" : "T" + std::to_string(k); }

std::string decorate(const std::string& base, const TempChannel& ch) {
  if (ch.movavg_days > 0) return "MA_" + base + "_" + std::to_string(ch.movavg_days);
  if (ch.lag_hours > 0) return base + "_lag" + std::to_string(ch.lag_hours);
  return base;
}

std::string two_digits(unsigned v) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%02u", v);
  return buf;
}

std::vector<Column> make_schema(const VariableSpec& spec) {
  std::vector<Column> cols;
  if (spec.trend) {
    cols.push_back({"Trend", [](const RowCtx& c) { return c.trend; }});
  }
  if (spec.hour_dummies) {
    for (unsigned h = 1; h <= 24; ++h) {
      cols.push_back({"H_" + two_digits(h),
                      [h](const RowCtx& c) { return c.hour == h ? 1.0 : 0.0; }});
    }
  }
  if (spec.week_dummies) {
    for (int w = 0; w < 7; ++w) {
      cols.push_back({"W_" + std::to_string(w + 1),
                      [w](const RowCtx& c) { return c.weekday == w ? 1.0 : 0.0; }});
    }
  }
  if (spec.month_dummies) {
    for (unsigned m = 1; m <= 12; ++m) {
      cols.push_back({"M_" + two_digits(m),
                      [m](const RowCtx& c) { return c.month == m ? 1.0 : 0.0; }});
    }
  }
  if (spec.hour_week_cross) {
    for (unsigned h = 1; h <= 24; ++h) {
      for (int w = 0; w < 7; ++w) {
        cols.push_back({"HxW_" + two_digits(h) + "_" + std::to_string(w + 1),
                        [h, w](const RowCtx& c) {
                          return (c.hour == h && c.weekday == w) ? 1.0 : 0.0;
                        }});
      }
    }
  }
  const bool raw = spec.temp_style == TempStyle::raw_powers ||
                   spec.temp_style == TempStyle::raw_and_crossed;
  const bool crossed = spec.temp_style == TempStyle::crossed_powers ||
                       spec.temp_style == TempStyle::raw_and_crossed;
  for (std::size_t ci = 0; ci < spec.channels.size(); ++ci) {
    const TempChannel& ch = spec.channels[ci];
    if (raw) {
      for (int k = 1; k <= 3; ++k) {
        cols.push_back({decorate(pow_base(k), ch), [ci, k](const RowCtx& c) {
                          return std::pow(c.temp[ci], k);
                        }});
      }
    }
    if (crossed) {
      for (int k = 1; k <= 3; ++k) {
        for (unsigned h = 1; h <= 24; ++h) {
          cols.push_back({decorate(pow_base(k) + "xH_" + two_digits(h), ch),
                          [ci, k, h](const RowCtx& c) {
                            return c.hour == h ? std::pow(c.temp[ci], k) : 0.0;
                          }});
        }
      }
      for (int k = 1; k <= 3; ++k) {
        for (unsigned m = 1; m <= 12; ++m) {
          cols.push_back({decorate(pow_base(k) + "xM_" + two_digits(m), ch),
                          [ci, k, m](const RowCtx& c) {
                            return c.month == m ? std::pow(c.temp[ci], k) : 0.0;
                          }});
        }
      }
    }
  }
  if (spec.humidity == HumidityStyle::raw_powers) {
    for (int k = 1; k <= 3; ++k) {
      cols.push_back({k == 1 ? "RH" : "RH" + std::to_string(k),
                      [k](const RowCtx& c) { return std::pow(c.rh, k); }});
    }
  } else if (spec.humidity == HumidityStyle::summer_interactions) {
    auto rhs = [](const RowCtx& c) { return c.summer ? c.rh : 0.0; };
    auto rhs2 = [](const RowCtx& c) { return c.summer ? c.rh * c.rh : 0.0; };
    cols.push_back({"RHS", rhs});
    cols.push_back({"RHS2", rhs2});
    cols.push_back({"TxRHS", [rhs](const RowCtx& c) { return c.concurrent_temp * rhs(c); }});
    cols.push_back({"T2xRHS", [rhs](const RowCtx& c) {
                      return c.concurrent_temp * c.concurrent_temp * rhs(c);
                    }});
    cols.push_back({"TxRHS2", [rhs2](const RowCtx& c) { return c.concurrent_temp * rhs2(c); }});
    cols.push_back({"T2xRHS2", [rhs2](const RowCtx& c) {
                      return c.concurrent_temp * c.concurrent_temp * rhs2(c);
                    }});
    for (unsigned h = 1; h <= 24; ++h) {
      cols.push_back({"HxRHS_" + two_digits(h), [h, rhs](const RowCtx& c) {
                        return c.hour == h ? rhs(c) : 0.0;
                      }});
    }
    for (unsigned h = 1; h <= 24; ++h) {
      cols.push_back({"HxRHS2_" + two_digits(h), [h, rhs2](const RowCtx& c) {
                        return c.hour == h ? rhs2(c) : 0.0;
                      }});
    }
  }
  return cols;
}

std::size_t temp_columns_per_channel(TempStyle style) {
  switch (style) {
    case TempStyle::none: return 0;
    case TempStyle::raw_powers: return 3;
    case TempStyle::crossed_powers: return 108;
    case TempStyle::raw_and_crossed: return 111;
  }
  return 0;
}

void check_contiguous(std::span<const HourlyRecord> records) {
  for (std::size_t i = 1; i < records.size(); ++i) {
    long long d = records[i].ts.hour_index() - records[i - 1].ts.hour_index();
    if (d != 1) {
      throw DataError("features.continuity",
                      "records not contiguous hourly at " + records[i].ts.to_string());
    }
  }
}

double channel_value(std::span<const HourlyRecord> records, std::size_t ri,
                     const TempChannel& ch) {
  if (ch.movavg_days == 0) return records[ri - ch.lag_hours].drybulb;
  double acc = 0.0;
  const std::size_t last = 24 * ch.movavg_days;
  for (std::size_t h = last - 23; h <= last; ++h) acc += records[ri - h].drybulb;
  return acc / 24.0;
}

}  // namespace

double relative_humidity(double drybulb_f, double dewpoint_f) {
  if (!std::isfinite(drybulb_f) || !std::isfinite(dewpoint_f)) {
    throw DataError("features.humidity_input", "non-finite temperature input");
  }
  const double rh = 100.0 * tetens_saturation(f_to_c(dewpoint_f)) /
                    tetens_saturation(f_to_c(drybulb_f));
  return std::clamp(rh, 0.0, 100.0);
}

std::size_t VariableSpec::column_count() const {
  std::size_t n = 0;
  if (trend) n += 1;
  if (hour_dummies) n += 24;
  if (week_dummies) n += 7;
  if (month_dummies) n += 12;
  if (hour_week_cross) n += 168;
  n += channels.size() * temp_columns_per_channel(temp_style);
  if (humidity == HumidityStyle::raw_powers) n += 3;
  if (humidity == HumidityStyle::summer_interactions) n += 54;
  return n;
}

std::size_t VariableSpec::history_hours() const {
  std::size_t h = 0;
  for (const auto& ch : channels) h = std::max(h, ch.history());
  return h;
}

VariableSpec VariableSpec::named(std::string_view name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  VariableSpec s;
  s.name = key;
  s.trend = true;
  if (key == "HOPS47" || key == "HOPS50" || key == "HOPS59") {
    s.hour_dummies = s.week_dummies = s.month_dummies = true;
    s.temp_style = TempStyle::raw_powers;
    s.channels = {{0, 0}};
    s.declared_columns = 47;
    if (key == "HOPS50") {
      s.humidity = HumidityStyle::raw_powers;
      s.declared_columns = 50;
    } else if (key == "HOPS59") {
      s.humidity = HumidityStyle::raw_powers;
      s.channels = {{0, 0}, {1, 0}, {2, 0}, {3, 0}};
      s.declared_columns = 59;
    }
  } else if (key == "G1" || key == "H1" || key == "G2" || key == "H2") {
    // hour/week main effects and raw temperature powers are omitted: the
    // hour-week and temperature-hour interactions already span them
    s.month_dummies = true;
    s.hour_week_cross = true;
    s.temp_style = TempStyle::crossed_powers;
    s.channels = {{0, 0}};
    s.declared_columns = 289;
    if (key == "H1") {
      s.humidity = HumidityStyle::summer_interactions;
      s.declared_columns = 343;
    } else if (key == "G2" || key == "H2") {
      s.channels = {{0, 0}, {1, 0}, {2, 0}, {3, 0}};
      s.declared_columns = key == "G2" ? 613 : 667;
      if (key == "H2") s.humidity = HumidityStyle::summer_interactions;
    }
  } else {
    throw ConfigError("features.spec_name", "unknown variable spec '" + key + "'");
  }
  if (s.column_count() != s.declared_columns) {
    throw ConfigError("features.column_count",
                      "variable spec " + key + " does not produce its declared width");
  }
  return s;
}

const std::vector<std::string>& VariableSpec::known_names() {
  static const std::vector<std::string> names{"HOPS47", "HOPS50", "HOPS59", "G1",
                                              "H1",     "G2",     "H2"};
  return names;
}

namespace {

void add_recency_channels(VariableSpec& s, std::size_t h, std::size_t d) {
  if (h > 24 || d < 1 || d > 7) {
    throw ConfigError("features.recency_range",
                      "recency parameters outside h in [0,24], d in [1,7]");
  }
  for (std::size_t i = 0; i <= h; ++i) s.channels.push_back({i, 0});
  for (std::size_t j = 1; j <= d; ++j) s.channels.push_back({0, j});
  s.recency_h = h;
  s.recency_d = d;
}

}  // namespace

VariableSpec VariableSpec::recency(std::size_t h, std::size_t d) {
  VariableSpec s;
  s.name = "RECENCY";
  s.trend = true;
  s.hour_dummies = s.week_dummies = s.month_dummies = true;
  s.hour_week_cross = true;
  s.temp_style = TempStyle::raw_and_crossed;
  add_recency_channels(s, h, d);
  return s;
}

VariableSpec VariableSpec::rehops(std::size_t h, std::size_t d) {
  VariableSpec s;
  s.name = "REHOPS";
  s.trend = true;
  s.hour_dummies = s.week_dummies = s.month_dummies = true;
  s.temp_style = TempStyle::raw_powers;
  add_recency_channels(s, h, d);
  return s;
}

VariableSpec VariableSpec::from_key(const std::string& name, std::size_t h,
                                    std::size_t d) {
  if (name == "RECENCY") return recency(h, d);
  if (name == "REHOPS") return rehops(h, d);
  return named(name);
}

std::size_t DesignMatrix::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw ConfigError("features.column_name", "no column named '" + std::string(name) + "'");
}

DesignMatrix calendar_features(std::span<const Timestamp> stamps) {
  for (std::size_t i = 1; i < stamps.size(); ++i) {
    if (!(stamps[i - 1] < stamps[i])) {
      throw DataError("features.order", "timestamps must be strictly increasing");
    }
  }
  VariableSpec s;
  s.trend = s.hour_dummies = s.week_dummies = s.month_dummies = true;
  auto schema = make_schema(s);

  DesignMatrix out;
  out.x = Matrix(stamps.size(), schema.size());
  out.columns.reserve(schema.size());
  for (const auto& c : schema) out.columns.push_back(c.name);
  out.stamps.assign(stamps.begin(), stamps.end());
  out.load.assign(stamps.size(), std::nullopt);
  out.trend_column = 0;
  RowCtx ctx;
  for (std::size_t r = 0; r < stamps.size(); ++r) {
    ctx.trend = static_cast<double>(r + 1);
    ctx.hour = stamps[r].hour;
    ctx.weekday = stamps[r].weekday_mon0();
    ctx.month = stamps[r].month;
    for (std::size_t c = 0; c < schema.size(); ++c) out.x(r, c) = schema[c].fn(ctx);
  }
  return out;
}

DesignMatrix build_design_matrix(std::span<const HourlyRecord> records,
                                 const VariableSpec& spec) {
  if (records.empty()) throw DataError("features.empty", "no records to build from");
  check_contiguous(records);

  const std::size_t depth = spec.history_hours();
  if (records.size() <= depth) {
    throw DataError("features.history",
                    "need more than " + std::to_string(depth) +
                        " hours of history for spec " + spec.name);
  }

  std::vector<std::string> bad;
  for (const auto& rec : records) {
    if (!std::isfinite(rec.drybulb) || !std::isfinite(rec.dewpoint)) {
      bad.push_back(rec.ts.to_string());
      if (bad.size() >= 8) break;
    }
  }
  if (!bad.empty()) {
    std::string list;
    for (const auto& t : bad) list += (list.empty() ? "" : ", ") + t;
    throw DataError("features.missing_weather", "missing weather values at: " + list);
  }

  auto schema = make_schema(spec);
  if (spec.declared_columns != 0 && schema.size() != spec.declared_columns) {
    throw ConfigError("features.column_count", "schema width mismatch for " + spec.name);
  }

  const std::size_t rows = records.size() - depth;
  DesignMatrix out;
  out.x = Matrix(rows, schema.size());
  out.columns.reserve(schema.size());
  for (const auto& c : schema) out.columns.push_back(c.name);
  out.stamps.reserve(rows);
  out.load.reserve(rows);
  out.dropped_head = depth;
  if (spec.trend) out.trend_column = spec.trend_column_index();
  if (depth > 0) {
    out.warnings.push_back("dropped " + std::to_string(depth) +
                           " warm-up rows before " + records[depth].ts.to_string());
  }

  const bool needs_rh = spec.humidity != HumidityStyle::none;
  RowCtx ctx;
  ctx.temp.resize(spec.channels.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t ri = r + depth;
    const HourlyRecord& rec = records[ri];
    ctx.trend = static_cast<double>(ri + 1);
    ctx.hour = rec.ts.hour;
    ctx.weekday = rec.ts.weekday_mon0();
    ctx.month = rec.ts.month;
    ctx.concurrent_temp = rec.drybulb;
    ctx.summer = rec.ts.month >= 6 && rec.ts.month <= 9;
    ctx.rh = needs_rh ? relative_humidity(rec.drybulb, rec.dewpoint) : 0.0;
    for (std::size_t ci = 0; ci < spec.channels.size(); ++ci) {
      ctx.temp[ci] = channel_value(records, ri, spec.channels[ci]);
    }
    for (std::size_t c = 0; c < schema.size(); ++c) out.x(r, c) = schema[c].fn(ctx);
    out.stamps.push_back(rec.ts);
    out.load.push_back(rec.load);
  }
  return out;
}

DesignMatrix recency_columns(std::span<const HourlyRecord> records, std::size_t h,
                             std::size_t d, int powers) {
  if (h > 24 || d < 1 || d > 7) {
    throw ConfigError("features.recency_range",
                      "recency parameters outside h in [0,24], d in [1,7]");
  }
  if (powers != 1 && powers != 3) {
    throw ConfigError("features.recency_powers", "powers must be 1 or 3");
  }
  VariableSpec s;
  s.name = "RECENCY_COLUMNS";
  s.temp_style = TempStyle::raw_powers;
  for (std::size_t i = 1; i <= h; ++i) s.channels.push_back({i, 0});
  for (std::size_t j = 1; j <= d; ++j) s.channels.push_back({0, j});
  DesignMatrix full = build_design_matrix(records, s);
  if (powers == 3) return full;
  // keep only the first power of each channel
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < full.columns.size(); c += 3) keep.push_back(c);
  DesignMatrix out;
  out.x = full.x.select_columns(keep);
  for (std::size_t c : keep) out.columns.push_back(full.columns[c]);
  out.stamps = std::move(full.stamps);
  out.load = std::move(full.load);
  out.dropped_head = full.dropped_head;
  out.warnings = std::move(full.warnings);
  return out;
}

void write_design_csv(const DesignMatrix& design, std::ostream& os) {
  os << "date,hour";
  for (const auto& c : design.columns) os << ',' << c;
  os << '\n';
  char buf[64];
  for (std::size_t r = 0; r < design.x.rows(); ++r) {
    const Timestamp& ts = design.stamps[r];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u,%u", ts.year, ts.month, ts.day, ts.hour);
    os << buf;
    for (std::size_t c = 0; c < design.x.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), ",%.17g", design.x(r, c));
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace hops
