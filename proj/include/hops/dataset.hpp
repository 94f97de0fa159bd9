#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "hops/records.hpp"

namespace hops {

// Column mapping for CSV ingestion. With a header row the *_col fields are
// header names (case-insensitive); without one they are 0-based indices.
// An empty zone_col with a nonempty fixed_zone assigns every row to one zone.
struct SchemaConfig {
  char delimiter = ',';
  bool has_header = true;
  std::string date_col = "date";
  std::string hour_col = "hour";
  std::string load_col = "demand";
  std::string drybulb_col = "drybulb";
  std::string dewpoint_col = "dewpoint";
  std::string zone_col = "zone";
  std::string fixed_zone;
  std::size_t max_bad_rows = 0;

  // key=value file, one entry per line, '#' comments
  static SchemaConfig from_file(const std::filesystem::path& path);
};

struct IngestSummary {
  // zone -> year -> row count
  std::map<std::string, std::map<int, std::size_t>> counts;
  std::vector<std::string> warnings;
  std::string to_string() const;
};

struct Dataset {
  std::map<std::string, std::vector<HourlyRecord>> zones;
  std::map<std::string, std::uint64_t> provenance;  // source file -> content hash
};

// The ten ISO New England series: eight load zones, the Massachusetts
// aggregate and the system total.
const std::vector<std::string>& canonical_zones();

Dataset ingest_csv(const std::filesystem::path& path, const SchemaConfig& schema = {},
                   IngestSummary* summary = nullptr);

// Canonical per-zone CSV (date,hour,load,drybulb,dewpoint at full precision);
// ingesting it back reproduces the records exactly.
void export_zone_csv(const std::vector<HourlyRecord>& records, std::ostream& os);

}  // namespace hops
