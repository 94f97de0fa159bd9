#include <cmath>
#include <sstream>

#include <doctest.h>

#include "hops/error.hpp"
#include "hops/experiment.hpp"
#include "hops/model_io.hpp"
#include "hops/metrics.hpp"
#include "oracles.hpp"
#include "synth.hpp"

using namespace hops;

namespace {

Dataset mini_dataset(unsigned seed) {
  Dataset ds;
  ds.zones["CT"] = synth::make_zone("CT", 2012, 2015, seed);
  ds.zones["NH"] = synth::make_zone("NH", 2012, 2015, seed + 1);
  ds.zones["TOTAL"] = synth::make_zone("TOTAL", 2012, 2015, seed + 2);
  return ds;
}

ExperimentProtocol quick_hops() {
  ExperimentProtocol p = ExperimentProtocol::preset("hops47");
  p.fixed_k2 = 6;
  p.fixed_k3 = 2;
  p.solver.max_iter = 60;
  p.threads = 2;
  return p;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("presets resolve and unknown names are rejected") {
  for (const auto& name : ExperimentProtocol::preset_names()) {
    CHECK_NOTHROW(ExperimentProtocol::preset(name));
  }
  CHECK_THROWS_WITH_AS(ExperimentProtocol::preset("hops9000"),
                       doctest::Contains("hops47"), ConfigError);
  ExperimentProtocol rehops = ExperimentProtocol::preset("rehops");
  CHECK(rehops.fixed_k2.value() == 60);
  CHECK(rehops.fixed_k3.value() == 9);
  CHECK(rehops.retrain.first == 2013);
  CHECK(rehops.h_range.size() == 25);
  CHECK(rehops.d_range.size() == 7);
}

TEST_CASE("grid clamping replaces oversized widths and deduplicates") {
  auto grid = clamp_grid({20, 28, 36, 44, 52, 60, 68, 76, 84}, 46);
  CHECK(grid == std::vector<std::size_t>{20, 28, 36, 44, 46});
  CHECK(default_k2_range(289).size() == 9);
  CHECK(default_k2_range(289).back() == 108);
  CHECK(default_k3_range().front() == 0);
}

TEST_CASE("single grid cell is selected trivially") {
  auto recs = synth::make_zone("CT", 2012, 2014, 40);
  ExperimentProtocol proto = quick_hops();
  std::vector<std::size_t> k2{4};
  std::vector<std::size_t> k3{0};
  GridSearchResult res =
      grid_search_k(recs, VariableSpec::named("HOPS47"), k2, k3, proto);
  CHECK(res.k2 == 4);
  CHECK(res.k3 == 0);
  CHECK(res.cells.size() == 1);
}

TEST_CASE("planted low-rank quadratic structure drives the selection") {
  // plant a signal that is exactly quadratic in the top two embedding
  // directions of the training design: k2 = 1 must miss part of it, k2 >= 2
  // captures it fully and the validation error goes flat
  auto recs = synth::make_zone("CT", 2012, 2014, 41);
  const VariableSpec vspec = VariableSpec::named("HOPS47");
  DesignMatrix design = build_design_matrix(recs, vspec);

  std::vector<std::size_t> train_idx;
  for (std::size_t r = 0; r < design.stamps.size(); ++r) {
    if (design.stamps[r].year <= 2013) train_idx.push_back(r);
  }
  MinMaxNormalizer nz = MinMaxNormalizer::fit_rows(design.x, train_idx);
  Matrix xn = nz.apply(design.x);
  Matrix xn_train(train_idx.size(), xn.cols());
  for (std::size_t i = 0; i < train_idx.size(); ++i) {
    auto src = xn.row(train_idx[i]);
    std::copy(src.begin(), src.end(), xn_train.row(i).begin());
  }
  ReductionMap top2 = fit_reduction(xn_train.drop_column(0), 2);

  Matrix z = apply_reduction(xn.drop_column(0), top2);
  auto noise = oracle::random_vector(z.rows(), 42, -0.02, 0.02);
  for (std::size_t r = 0; r < recs.size(); ++r) {
    recs[r].load = 100.0 + 40.0 * z(r, 0) * z(r, 0) + 25.0 * z(r, 1) * z(r, 1) +
                   10.0 * z(r, 0) + noise[r];
  }

  ExperimentProtocol proto = quick_hops();
  proto.solver.max_iter = 400;
  proto.solver.tolerance = 1e-12;
  std::vector<std::size_t> k2{1, 2, 4};
  std::vector<std::size_t> k3{0};
  GridSearchResult res = grid_search_k(recs, vspec, k2, k3, proto);
  REQUIRE(res.cells.size() == 3);
  CHECK(res.cells[0].validation_mape > res.cells[1].validation_mape);
  CHECK(res.k2 >= 2);
}

TEST_CASE("experiment report over a small synthetic dataset") {
  Dataset ds = mini_dataset(50);
  ExperimentProtocol proto = quick_hops();
  ExperimentReport report =
      run_experiment(ds, {"CT", "NH", "TOTAL"}, proto);

  REQUIRE(report.zones.size() == 3);
  CHECK(report.zones.back().zone == "TOTAL");  // TOTAL ordered last
  for (const auto& z : report.zones) {
    CHECK(z.ok);
    CHECK(z.mape > 0.0);
    CHECK(z.mape < 50.0);
    CHECK(z.stamps.size() == 8760);  // the 2015 test year is complete
  }
  CHECK_FALSE(report.partial);

  // AVERAGE is the arithmetic mean of the non-TOTAL zones
  const double expect = (report.zones[0].mape + report.zones[1].mape) / 2.0;
  CHECK(std::abs(report.average_mape() - expect) <= 1e-9);
  CHECK(report.averaged_zones() == 2);

  std::ostringstream csv;
  report.write_csv(csv);
  CHECK(csv.str().find("AVERAGE") != std::string::npos);
  std::ostringstream plot;
  report.write_plot_csv(plot);
  CHECK(plot.str().find("CT,hops47,mape_pct,") != std::string::npos);
}

TEST_CASE("experiments are deterministic end to end") {
  Dataset ds = mini_dataset(60);
  ExperimentProtocol proto = quick_hops();
  proto.solver.max_iter = 25;
  ExperimentReport r1 = run_experiment(ds, {"CT"}, proto);
  ExperimentReport r2 = run_experiment(ds, {"CT"}, proto);
  REQUIRE(r1.zones.size() == 1);
  CHECK(r1.zones[0].mape == r2.zones[0].mape);
  CHECK(r1.zones[0].predicted == r2.zones[0].predicted);
}

TEST_CASE("an unknown zone yields a partial report, empty zone list succeeds") {
  Dataset ds = mini_dataset(70);
  ExperimentProtocol proto = quick_hops();
  proto.solver.max_iter = 5;
  ExperimentReport report = run_experiment(ds, {"CT", "XX"}, proto);
  CHECK(report.partial);
  bool found_error = false;
  for (const auto& z : report.zones) {
    if (z.zone == "XX") {
      CHECK_FALSE(z.ok);
      CHECK(z.error.find("experiment.zone") != std::string::npos);
      found_error = true;
    }
  }
  CHECK(found_error);

  ExperimentReport empty = run_experiment(ds, {}, proto);
  CHECK(empty.zones.empty());
  CHECK_FALSE(empty.partial);
}

TEST_CASE("wider variable sets do not fit the training span worse") {
  auto recs = synth::make_zone("CT", 2012, 2013, 80, {}, 3);
  SolverConfig solver;
  solver.max_iter = 800;
  solver.tolerance = 1e-12;

  double prev = -1.0;
  for (const char* name : {"HOPS59", "HOPS50", "HOPS47"}) {
    auto [model, trace] =
        fit_hops(recs, VariableSpec::named(name), {2012, 2013}, 8, 0, solver);
    SavedModel saved;
    saved.variables = name;
    saved.model = model;
    PredictionSet pred = predict_saved(saved, recs, {2012, 2013}, LeakageGuard::off);
    const double fit_mse = mse(pred.actual_values(), pred.predicted);
    if (prev >= 0.0) {
      CHECK(fit_mse >= prev - 1e-6 * (1.0 + prev));  // narrower set never fits better
    }
    prev = fit_mse;
  }
}

TEST_CASE("rehops on a small grid") {
  Dataset ds;
  synth::Options opt;
  opt.planted_lag = 1;
  ds.zones["CT"] = synth::make_zone("CT", 2012, 2015, 90, opt, 48);
  ExperimentProtocol proto = ExperimentProtocol::preset("rehops");
  proto.h_range = {0, 1};
  proto.d_range = {1};
  proto.fixed_k2 = 5;
  proto.fixed_k3 = 0;
  proto.solver.max_iter = 40;
  proto.threads = 2;
  ExperimentReport report = run_experiment(ds, {"CT"}, proto);
  REQUIRE(report.zones.size() == 1);
  CHECK(report.zones[0].ok);
  CHECK(report.zones[0].k2 == 5);
  CHECK(report.zones[0].h <= 1);
}

}  // TEST_SUITE
