#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hops/benchmarks.hpp"
#include "hops/dataset.hpp"
#include "hops/solver.hpp"

namespace hops {

enum class ModelKind { hops, benchmark, recency, rehops };

struct ExperimentProtocol {
  YearSpan train{2012, 2013};
  int validation_year = 2014;
  YearSpan retrain{2012, 2014};
  int test_year = 2015;
  ModelKind kind = ModelKind::hops;
  std::string label = "hops47";              // report name (preset key)
  std::string variables = "HOPS47";          // VariableSpec key
  std::vector<std::size_t> k2_range;         // empty -> defaults for the width
  std::vector<std::size_t> k3_range;
  std::optional<std::size_t> fixed_k2;
  std::optional<std::size_t> fixed_k3;
  std::vector<std::size_t> h_range;          // recency-style searches
  std::vector<std::size_t> d_range;
  SolverConfig solver;
  LeakageGuard guard = LeakageGuard::warn;
  unsigned threads = 0;                      // 0 -> hardware count

  static ExperimentProtocol preset(std::string_view name);
  static const std::vector<std::string>& preset_names();
  std::string describe() const;
  std::uint64_t config_hash() const;
  unsigned effective_threads() const;
};

// Embedding-dimension search grids; the wider quadratic grid applies to
// 289-wide inputs. Values above the reduced feature width are replaced by it
// and duplicates removed.
std::vector<std::size_t> default_k2_range(std::size_t input_dim);
std::vector<std::size_t> default_k3_range();
std::vector<std::size_t> clamp_grid(std::vector<std::size_t> range, std::size_t max_dim);

struct GridCell {
  std::size_t k2 = 0;
  std::size_t k3 = 0;
  double validation_mape = 0.0;
  std::size_t iterations = 0;
};

struct GridSearchResult {
  std::size_t k2 = 0;
  std::size_t k3 = 0;
  std::vector<GridCell> cells;
};

// Train on protocol.train, score each (k2, k3) on the validation year, pick
// the minimizer (ties toward smaller k3, then smaller k2).
GridSearchResult grid_search_k(std::span<const HourlyRecord> records,
                               const VariableSpec& vspec,
                               std::span<const std::size_t> k2_range,
                               std::span<const std::size_t> k3_range,
                               const ExperimentProtocol& protocol);

struct ZoneResult {
  std::string zone;
  bool ok = false;
  std::string error;
  double mape = 0.0;
  double mse = 0.0;
  double daily_peak = 0.0;
  std::size_t k2 = 0, k3 = 0, h = 0, d = 0;
  std::size_t solver_iterations = 0;
  double seconds = 0.0;
  std::vector<Timestamp> stamps;
  std::vector<double> predicted;
  std::vector<double> actual;
  std::vector<std::string> warnings;
};

struct ExperimentReport {
  std::string model;
  std::string protocol;
  std::uint64_t config_hash = 0;
  std::vector<ZoneResult> zones;  // alphabetical, TOTAL last
  bool partial = false;

  // means over the successful non-TOTAL zones
  std::size_t averaged_zones() const;
  double average_mape() const;
  double average_mse() const;
  double average_daily_peak() const;

  void write_csv(std::ostream& os) const;
  void write_json(std::ostream& os) const;
  // tidy long format (zone, model, metric, value) for external plotting
  void write_plot_csv(std::ostream& os) const;
};

ExperimentReport run_experiment(const Dataset& dataset,
                                std::vector<std::string> zones,
                                const ExperimentProtocol& protocol);

// One polynomial fit on the given years (normalizer and embeddings fitted on
// those rows); embedding widths are clamped to the reduced feature width.
std::pair<PolyModel, SolverTrace> fit_hops(std::span<const HourlyRecord> records,
                                           const VariableSpec& vspec,
                                           YearSpan train_years, std::size_t k2,
                                           std::size_t k3, const SolverConfig& solver);

struct SavedModel;  // model_io.hpp
PredictionSet predict_saved(const SavedModel& saved,
                            std::span<const HourlyRecord> records, YearSpan years,
                            LeakageGuard guard = LeakageGuard::warn);

}  // namespace hops
