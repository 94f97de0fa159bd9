#include "hops/dataset.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "hops/error.hpp"
#include "hops/util.hpp"

namespace hops {
namespace {

std::string trim(std::string s) {
  auto issp = [](unsigned char c) { return std::isspace(c); };
  while (!s.empty() && issp(s.front())) s.erase(s.begin());
  while (!s.empty() && issp(s.back())) s.pop_back();
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == delim) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_date(const std::string& raw, int& y, unsigned& m, unsigned& d) {
  int yy = 0;
  unsigned mm = 0, dd = 0;
  if (std::sscanf(raw.c_str(), "%d-%u-%u", &yy, &mm, &dd) == 3 ||
      std::sscanf(raw.c_str(), "%u/%u/%d", &mm, &dd, &yy) == 3) {
    y = yy;
    m = mm;
    d = dd;
    return m >= 1 && m <= 12 && d >= 1 && d <= 31;
  }
  return false;
}

bool parse_double(const std::string& raw, double& out) {
  const std::string t = trim(raw);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size();
}

struct ColumnMap {
  std::ptrdiff_t date = -1, hour = -1, load = -1, drybulb = -1, dewpoint = -1, zone = -1;
};

std::ptrdiff_t resolve(const std::vector<std::string>& header, const std::string& want,
                       bool has_header, bool required) {
  if (want.empty()) {
    if (required) throw ConfigError("ingest.schema", "required column mapping is empty");
    return -1;
  }
  if (!has_header) {
    try {
      return std::stol(want);
    } catch (...) {
      throw ConfigError("ingest.schema",
                        "no header: column '" + want + "' must be a 0-based index");
    }
  }
  const std::string key = lower(trim(want));
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (lower(trim(header[i])) == key) return static_cast<std::ptrdiff_t>(i);
  }
  if (required) {
    throw ConfigError("ingest.schema", "column '" + want + "' not found in header");
  }
  return -1;
}

}  // namespace

SchemaConfig SchemaConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("ingest.config", "cannot open schema config " + path.string());
  SchemaConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("ingest.config",
                        "expected key=value at line " + std::to_string(lineno));
    }
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "delimiter") {
      cfg.delimiter = val == "\\t" ? '\t' : (val.empty() ? ',' : val[0]);
    } else if (key == "has_header") {
      cfg.has_header = val == "true" || val == "1" || val == "yes";
    } else if (key == "date") {
      cfg.date_col = val;
    } else if (key == "hour") {
      cfg.hour_col = val;
    } else if (key == "load" || key == "demand") {
      cfg.load_col = val;
    } else if (key == "drybulb") {
      cfg.drybulb_col = val;
    } else if (key == "dewpoint") {
      cfg.dewpoint_col = val;
    } else if (key == "zone") {
      cfg.zone_col = val;
    } else if (key == "zone_value") {
      cfg.fixed_zone = val;
    } else if (key == "max_bad_rows") {
      cfg.max_bad_rows = std::stoul(val);
    } else {
      throw ConfigError("ingest.config", "unknown schema key '" + key + "'");
    }
  }
  return cfg;
}

std::string IngestSummary::to_string() const {
  std::ostringstream os;
  for (const auto& [zone, years] : counts) {
    os << zone << ':';
    std::size_t total = 0;
    for (const auto& [year, n] : years) {
      os << ' ' << year << '=' << n;
      total += n;
    }
    os << " total=" << total << '\n';
  }
  for (const auto& w : warnings) os << "warning: " << w << '\n';
  return os.str();
}

const std::vector<std::string>& canonical_zones() {
  static const std::vector<std::string> zones{"ME",     "NH",     "VT",     "CT",
                                              "RI",     "SEMASS", "WCMASS", "NEMASS",
                                              "MASS",   "TOTAL"};
  return zones;
}

Dataset ingest_csv(const std::filesystem::path& path, const SchemaConfig& schema,
                   IngestSummary* summary) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("ingest.open", "cannot open " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());

  Dataset ds;
  ds.provenance[path.string()] = fnv1a64(content.data(), content.size());

  std::istringstream lines(content);
  std::string line;
  std::size_t lineno = 0;

  ColumnMap cols;
  if (schema.has_header) {
    if (!std::getline(lines, line)) throw DataError("ingest.empty", "empty file");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split(line, schema.delimiter);
    cols.date = resolve(header, schema.date_col, true, true);
    cols.hour = resolve(header, schema.hour_col, true, true);
    cols.load = resolve(header, schema.load_col, true, true);
    cols.drybulb = resolve(header, schema.drybulb_col, true, true);
    cols.dewpoint = resolve(header, schema.dewpoint_col, true, true);
    cols.zone = resolve(header, schema.zone_col, true, schema.fixed_zone.empty());
  } else {
    std::vector<std::string> dummy;
    cols.date = resolve(dummy, schema.date_col, false, true);
    cols.hour = resolve(dummy, schema.hour_col, false, true);
    cols.load = resolve(dummy, schema.load_col, false, true);
    cols.drybulb = resolve(dummy, schema.drybulb_col, false, true);
    cols.dewpoint = resolve(dummy, schema.dewpoint_col, false, true);
    cols.zone = schema.fixed_zone.empty()
                    ? resolve(dummy, schema.zone_col, false, true)
                    : -1;
  }

  std::vector<std::string> bad_lines;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  while (std::getline(lines, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split(line, schema.delimiter);
    auto field = [&](std::ptrdiff_t i) -> const std::string& {
      static const std::string empty;
      return (i >= 0 && static_cast<std::size_t>(i) < fields.size())
                 ? fields[static_cast<std::size_t>(i)]
                 : empty;
    };

    HourlyRecord rec;
    double hour_raw = 0.0;
    bool ok = parse_date(field(cols.date), rec.ts.year, rec.ts.month, rec.ts.day) &&
              parse_double(field(cols.hour), hour_raw) && hour_raw >= 1 &&
              hour_raw <= 24 && hour_raw == std::floor(hour_raw);
    if (ok) {
      rec.ts.hour = static_cast<unsigned>(hour_raw);
      ok = rec.ts.valid_date();
    }
    if (ok) {
      double v = 0.0;
      rec.load = parse_double(field(cols.load), v) ? std::optional<double>(v) : std::nullopt;
      rec.drybulb = parse_double(field(cols.drybulb), v) ? v : nan;
      rec.dewpoint = parse_double(field(cols.dewpoint), v) ? v : nan;
      rec.zone = cols.zone >= 0 ? trim(field(cols.zone)) : schema.fixed_zone;
      if (rec.zone.empty()) ok = false;
    }
    if (!ok) {
      bad_lines.push_back(std::to_string(lineno));
      continue;
    }
    ds.zones[rec.zone].push_back(std::move(rec));
  }

  if (bad_lines.size() > schema.max_bad_rows) {
    std::string list;
    for (std::size_t i = 0; i < std::min<std::size_t>(bad_lines.size(), 10); ++i) {
      list += (i ? ", " : "") + bad_lines[i];
    }
    throw DataError("ingest.bad_rows",
                    std::to_string(bad_lines.size()) + " unparseable rows (lines " + list +
                        (bad_lines.size() > 10 ? ", ..." : "") + ")");
  }

  // Per-zone validation: strict hourly continuity and bounded weather gaps.
  for (auto& [zone, recs] : ds.zones) {
    for (std::size_t i = 1; i < recs.size(); ++i) {
      const long long diff = recs[i].ts.hour_index() - recs[i - 1].ts.hour_index();
      if (diff == 0) {
        throw DataError("ingest.duplicate_hour",
                        zone + ": duplicated hour " + recs[i].ts.to_string());
      }
      if (diff < 0) {
        throw DataError("ingest.order",
                        zone + ": timestamps not increasing at " + recs[i].ts.to_string());
      }
      if (diff != 1) {
        throw DataError("ingest.gap", zone + ": missing hour(s) before " +
                                          recs[i].ts.to_string());
      }
    }
    // Interpolate weather gaps of at most two consecutive hours; load is
    // never imputed.
    for (auto member : {&HourlyRecord::drybulb, &HourlyRecord::dewpoint}) {
      std::size_t i = 0;
      while (i < recs.size()) {
        if (std::isfinite(recs[i].*member)) {
          ++i;
          continue;
        }
        std::size_t j = i;
        while (j < recs.size() && !std::isfinite(recs[j].*member)) ++j;
        const std::size_t gap = j - i;
        if (gap > 2 || i == 0 || j == recs.size()) {
          throw DataError("ingest.weather_gap",
                          zone + ": weather gap of " + std::to_string(gap) +
                              " hour(s) at " + recs[i].ts.to_string());
        }
        const double before = recs[i - 1].*member;
        const double after = recs[j].*member;
        for (std::size_t t = i; t < j; ++t) {
          const double frac = static_cast<double>(t - i + 1) / static_cast<double>(gap + 1);
          recs[t].*member = before + frac * (after - before);
        }
        if (summary) {
          summary->warnings.push_back(zone + ": interpolated " + std::to_string(gap) +
                                      "-hour weather gap at " + recs[i].ts.to_string());
        }
        i = j;
      }
    }
  }

  if (summary) {
    for (const auto& [zone, recs] : ds.zones) {
      for (const auto& r : recs) summary->counts[zone][r.ts.year]++;
    }
    for (const auto& b : bad_lines) {
      summary->warnings.push_back("skipped unparseable line " + b);
    }
  }
  return ds;
}

void export_zone_csv(const std::vector<HourlyRecord>& records, std::ostream& os) {
  os << "date,hour,load,drybulb,dewpoint\n";
  char buf[160];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u,%u,", r.ts.year, r.ts.month, r.ts.day,
                  r.ts.hour);
    os << buf;
    if (r.load) {
      std::snprintf(buf, sizeof(buf), "%.17g", *r.load);
      os << buf;
    }
    std::snprintf(buf, sizeof(buf), ",%.17g,%.17g\n", r.drybulb, r.dewpoint);
    os << buf;
  }
}

}  // namespace hops
