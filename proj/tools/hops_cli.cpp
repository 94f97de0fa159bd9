// Command-line front end: ingest -> features -> fit/predict -> evaluate,
// plus the grid-search and preset experiment pipelines.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hops/dataset.hpp"
#include "hops/error.hpp"
#include "hops/experiment.hpp"
#include "hops/kernels.hpp"
#include "hops/metrics.hpp"
#include "hops/model_io.hpp"
#include "hops/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string data_path;
  std::string schema_path;
  std::string out_dir = "out";
  std::string zones_csv;
  unsigned threads = 0;
  bool strict = false;
};

fs::path resolve_data(const CommonOpts& c) {
  if (!c.data_path.empty()) return c.data_path;
  const std::string dir = hops::env_or("HOPS_DATA_DIR", "");
  if (dir.empty()) {
    throw hops::ConfigError("cli.data",
                            "no --data given and HOPS_DATA_DIR is not set");
  }
  return fs::path(dir) / "isone.csv";
}

hops::SchemaConfig load_schema(const CommonOpts& c) {
  if (c.schema_path.empty()) return {};
  return hops::SchemaConfig::from_file(c.schema_path);
}

std::vector<std::string> pick_zones(const CommonOpts& c, const hops::Dataset& ds) {
  std::vector<std::string> zones;
  if (c.zones_csv.empty()) {
    for (const auto& z : hops::canonical_zones()) {
      if (ds.zones.count(z)) zones.push_back(z);
    }
    if (zones.empty()) {
      for (const auto& [z, _] : ds.zones) zones.push_back(z);
    }
  } else {
    std::stringstream ss(c.zones_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) zones.push_back(item);
    }
  }
  return zones;
}

const std::vector<hops::HourlyRecord>& zone_records(const hops::Dataset& ds,
                                                    const std::string& zone) {
  auto it = ds.zones.find(zone);
  if (it == ds.zones.end()) {
    throw hops::DataError("cli.zone", "zone '" + zone + "' not present in dataset");
  }
  return it->second;
}

void write_run_json(const fs::path& out_dir, const std::string& command,
                    const std::vector<std::string>& argv, const hops::Dataset* ds,
                    const std::vector<std::string>& outputs) {
  json run;
  run["command"] = command;
  run["argv"] = argv;
  run["kernel_backend"] = hops::kern::backend_name();
  if (ds) {
    json inputs = json::object();
    for (const auto& [file, hash] : ds->provenance) inputs[file] = hops::to_hex(hash);
    run["inputs"] = inputs;
  }
  run["outputs"] = outputs;
  std::ofstream os(out_dir / "run.json");
  os << run.dump(2) << '\n';
}

void write_predictions_csv(const hops::PredictionSet& pred, std::ostream& os) {
  os << "date,hour,actual,predicted\n";
  char buf[128];
  for (std::size_t i = 0; i < pred.stamps.size(); ++i) {
    const auto& ts = pred.stamps[i];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u,%u,", ts.year, ts.month, ts.day,
                  ts.hour);
    os << buf;
    if (pred.actual[i]) {
      std::snprintf(buf, sizeof(buf), "%.17g", *pred.actual[i]);
      os << buf;
    }
    std::snprintf(buf, sizeof(buf), ",%.17g\n", pred.predicted[i]);
    os << buf;
  }
}

std::pair<int, int> parse_years(const std::string& spec) {
  int a = 0, b = 0;
  if (std::sscanf(spec.c_str(), "%d:%d", &a, &b) == 2) return {a, b};
  if (std::sscanf(spec.c_str(), "%d", &a) == 1) return {a, a};
  throw hops::ConfigError("cli.years", "expected YEAR or FIRST:LAST, got '" + spec + "'");
}

std::vector<std::size_t> parse_size_list(const std::string& csv) {
  std::vector<std::size_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoul(item));
  }
  return out;
}

struct FitOpts {
  std::string spec = "HOPS47";
  std::string zone;
  std::string train_years = "2012:2014";
  std::size_t k2 = 0, k3 = 0, h = 0, d = 1;
  std::size_t max_iter = 1000;
  double tolerance = 1e-7;
  std::string alpha_mode = "exact";
};

hops::SolverConfig solver_from(const FitOpts& f) {
  hops::SolverConfig cfg;
  cfg.max_iter = f.max_iter;
  cfg.tolerance = f.tolerance;
  if (f.alpha_mode == "exact") {
    cfg.alpha_mode = hops::AlphaMode::exact;
  } else if (f.alpha_mode == "residual") {
    cfg.alpha_mode = hops::AlphaMode::residual;
  } else {
    throw hops::ConfigError("cli.alpha_mode", "alpha mode must be exact or residual");
  }
  return cfg;
}

bool is_hops_spec(const std::string& key) {
  std::string k = key;
  for (auto& c : k) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return k.rfind("HOPS", 0) == 0 || k == "REHOPS" || k == "G1_HOPS";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"high-order polynomial load forecasting toolkit"};
  app.require_subcommand(1);

  CommonOpts common;
  app.add_option("--data", common.data_path, "input CSV (default $HOPS_DATA_DIR/isone.csv)");
  app.add_option("--schema", common.schema_path, "key=value column-mapping config");
  app.add_option("--out", common.out_dir, "output directory");
  app.add_option("--zones", common.zones_csv, "comma-separated zone filter");
  app.add_option("--threads", common.threads, "worker threads (0 = all cores)");
  app.add_flag("--strict", common.strict, "escalate data-leakage warnings to errors");

  auto* cmd_ingest = app.add_subcommand("ingest", "validate a CSV and export canonical per-zone files");

  auto* cmd_features = app.add_subcommand("features", "export a design matrix as CSV");
  FitOpts feat;
  cmd_features->add_option("--spec", feat.spec, "variable spec name");
  cmd_features->add_option("--zone", feat.zone, "zone id")->required();
  cmd_features->add_option("--h", feat.h, "lag hours for recency-style specs");
  cmd_features->add_option("--d", feat.d, "moving-average days for recency-style specs");

  auto* cmd_fit = app.add_subcommand("fit", "fit one model and write the model file");
  FitOpts fit;
  cmd_fit->add_option("--spec", fit.spec, "variable spec (HOPS47, G1, RECENCY, ...)");
  cmd_fit->add_option("--zone", fit.zone, "zone id")->required();
  cmd_fit->add_option("--train-years", fit.train_years, "FIRST:LAST training years");
  cmd_fit->add_option("--k2", fit.k2, "quadratic embedding width");
  cmd_fit->add_option("--k3", fit.k3, "cubic embedding width (0 removes the term)");
  cmd_fit->add_option("--h", fit.h, "lag hours for recency-style specs");
  cmd_fit->add_option("--d", fit.d, "moving-average days for recency-style specs");
  cmd_fit->add_option("--max-iter", fit.max_iter, "solver iteration cap");
  cmd_fit->add_option("--tolerance", fit.tolerance, "relative loss-change tolerance");
  cmd_fit->add_option("--alpha-mode", fit.alpha_mode, "step rule: exact | residual");

  auto* cmd_predict = app.add_subcommand("predict", "predict from a saved model");
  std::string model_path;
  std::string predict_years = "2015";
  cmd_predict->add_option("--model", model_path, "model file")->required();
  std::string predict_zone;
  cmd_predict->add_option("--zone", predict_zone, "zone id")->required();
  cmd_predict->add_option("--years", predict_years, "YEAR or FIRST:LAST to predict");

  auto* cmd_evaluate = app.add_subcommand("evaluate", "score a predictions CSV");
  std::string predictions_path;
  cmd_evaluate->add_option("--predictions", predictions_path, "predictions CSV")->required();

  auto* cmd_grid = app.add_subcommand("gridsearch", "embedding-width search for one zone");
  FitOpts grid;
  std::string k2_csv, k3_csv;
  cmd_grid->add_option("--spec", grid.spec, "variable spec name");
  cmd_grid->add_option("--zone", grid.zone, "zone id")->required();
  cmd_grid->add_option("--k2-range", k2_csv, "comma-separated quadratic widths");
  cmd_grid->add_option("--k3-range", k3_csv, "comma-separated cubic widths");
  cmd_grid->add_option("--max-iter", grid.max_iter, "solver iteration cap");
  cmd_grid->add_option("--tolerance", grid.tolerance, "relative loss-change tolerance");
  cmd_grid->add_option("--alpha-mode", grid.alpha_mode, "step rule: exact | residual");

  auto* cmd_experiment = app.add_subcommand("experiment", "run a full preset pipeline");
  std::string preset = "hops47";
  FitOpts exp_opts;
  bool plot_data = false;
  cmd_experiment->add_option("--preset", preset, "one of the experiment presets");
  cmd_experiment->add_option("--max-iter", exp_opts.max_iter, "solver iteration cap");
  cmd_experiment->add_option("--tolerance", exp_opts.tolerance, "loss-change tolerance");
  cmd_experiment->add_option("--alpha-mode", exp_opts.alpha_mode, "exact | residual");
  std::string exp_k2_csv, exp_k3_csv;
  std::size_t exp_fixed_k2 = 0, exp_fixed_k3 = 0;
  bool has_fixed_k2 = false, has_fixed_k3 = false;
  cmd_experiment->add_option("--k2-range", exp_k2_csv, "override quadratic search range");
  cmd_experiment->add_option("--k3-range", exp_k3_csv, "override cubic search range");
  cmd_experiment->add_option("--k2", exp_fixed_k2, "fix the quadratic width (skip search)")
      ->each([&](const std::string&) { has_fixed_k2 = true; });
  cmd_experiment->add_option("--k3", exp_fixed_k3, "fix the cubic width")
      ->each([&](const std::string&) { has_fixed_k3 = true; });
  std::string h_csv, d_csv;
  cmd_experiment->add_option("--h-range", h_csv, "override lag search range");
  cmd_experiment->add_option("--d-range", d_csv, "override moving-average search range");
  cmd_experiment->add_flag("--plot-data", plot_data, "also write tidy long-format CSV");

  CLI11_PARSE(app, argc, argv);

  std::vector<std::string> argv_copy(argv, argv + argc);
  const fs::path out_dir(common.out_dir);
  const hops::LeakageGuard guard =
      common.strict ? hops::LeakageGuard::strict : hops::LeakageGuard::warn;

  try {
    fs::create_directories(out_dir);
    std::vector<std::string> outputs;

    auto load_dataset = [&](hops::IngestSummary* summary = nullptr) {
      return hops::ingest_csv(resolve_data(common), load_schema(common), summary);
    };

    if (cmd_ingest->parsed()) {
      hops::IngestSummary summary;
      hops::Dataset ds = load_dataset(&summary);
      std::cout << summary.to_string();
      for (const auto& zone : pick_zones(common, ds)) {
        const fs::path p = out_dir / (zone + ".csv");
        std::ofstream os(p);
        hops::export_zone_csv(zone_records(ds, zone), os);
        outputs.push_back(p.string());
      }
      write_run_json(out_dir, "ingest", argv_copy, &ds, outputs);
      return 0;
    }

    if (cmd_features->parsed()) {
      hops::Dataset ds = load_dataset();
      hops::VariableSpec vspec = hops::VariableSpec::from_key(
          feat.spec.empty() ? "HOPS47" : feat.spec, feat.h, feat.d);
      hops::DesignMatrix design =
          hops::build_design_matrix(zone_records(ds, feat.zone), vspec);
      const fs::path p = out_dir / (feat.zone + "_" + vspec.name + "_features.csv");
      std::ofstream os(p);
      hops::write_design_csv(design, os);
      outputs.push_back(p.string());
      for (const auto& w : design.warnings) hops::emit_warning(w);
      write_run_json(out_dir, "features", argv_copy, &ds, outputs);
      std::cout << "wrote " << p.string() << " (" << design.x.rows() << " x "
                << design.x.cols() << ")\n";
      return 0;
    }

    if (cmd_fit->parsed()) {
      hops::Dataset ds = load_dataset();
      const auto& records = zone_records(ds, fit.zone);
      auto [y0, y1] = parse_years(fit.train_years);
      hops::SavedModel saved;
      saved.variables = fit.spec;
      for (auto& c : saved.variables) {
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      }
      saved.recency_h = fit.h;
      saved.recency_d = fit.d;
      hops::VariableSpec vspec =
          hops::VariableSpec::from_key(saved.variables, fit.h, fit.d);

      if (is_hops_spec(saved.variables) || fit.k2 > 0) {
        std::size_t k2 = fit.k2 > 0 ? fit.k2 : 20;
        auto [model, trace] =
            hops::fit_hops(records, vspec, {y0, y1}, k2, fit.k3, solver_from(fit));
        const fs::path tp = out_dir / (fit.zone + "_trace.csv");
        std::ofstream ts(tp);
        trace.write_csv(ts);
        outputs.push_back(tp.string());
        std::cout << "iterations=" << trace.iterations() << " final_loss="
                  << (trace.loss.empty() ? trace.initial_loss : trace.loss.back())
                  << '\n';
        saved.model = std::move(model);
      } else {
        hops::LinearModel model = hops::fit_linear(records, vspec, {y0, y1});
        const fs::path cp = out_dir / (fit.zone + "_coefficients.csv");
        std::ofstream cs(cp);
        cs << "column,coefficient\n";
        cs << "(intercept)," << model.coefficients[0] << '\n';
        hops::DesignMatrix d0 = hops::build_design_matrix(records, vspec);
        for (std::size_t c = 0; c < d0.columns.size(); ++c) {
          cs << d0.columns[c] << ',' << model.coefficients[c + 1] << '\n';
        }
        outputs.push_back(cp.string());
        saved.model = std::move(model);
      }
      const fs::path mp = out_dir / (fit.zone + "_" + saved.variables + ".hopsmodel");
      hops::save_model(saved, mp);
      outputs.push_back(mp.string());
      write_run_json(out_dir, "fit", argv_copy, &ds, outputs);
      std::cout << "wrote " << mp.string() << '\n';
      return 0;
    }

    if (cmd_predict->parsed()) {
      hops::Dataset ds = load_dataset();
      hops::SavedModel saved = hops::load_model(fs::path(model_path));
      auto [y0, y1] = parse_years(predict_years);
      hops::PredictionSet pred =
          hops::predict_saved(saved, zone_records(ds, predict_zone), {y0, y1}, guard);
      const fs::path p = out_dir / (predict_zone + "_predictions.csv");
      std::ofstream os(p);
      write_predictions_csv(pred, os);
      outputs.push_back(p.string());
      write_run_json(out_dir, "predict", argv_copy, &ds, outputs);
      std::cout << "wrote " << p.string() << " (" << pred.predicted.size() << " rows)\n";
      return 0;
    }

    if (cmd_evaluate->parsed()) {
      std::ifstream is(predictions_path);
      if (!is) throw hops::DataError("cli.open", "cannot open " + predictions_path);
      std::string line;
      std::getline(is, line);  // header
      std::vector<double> actual, predicted;
      std::vector<hops::Timestamp> stamps;
      while (std::getline(is, line)) {
        if (line.empty()) continue;
        hops::Timestamp ts;
        double a = 0, p = 0;
        if (std::sscanf(line.c_str(), "%d-%u-%u,%u,%lf,%lf", &ts.year, &ts.month, &ts.day,
                        &ts.hour, &a, &p) != 6) {
          throw hops::DataError("cli.predictions",
                                "row without actual value cannot be scored: " + line);
        }
        stamps.push_back(ts);
        actual.push_back(a);
        predicted.push_back(p);
      }
      std::vector<std::string> warnings;
      json out;
      out["mape_pct"] = hops::mape(actual, predicted);
      out["mse"] = hops::mse(actual, predicted);
      out["daily_peak_mape_pct"] =
          hops::daily_peak_mape(actual, predicted, stamps, &warnings);
      out["rows"] = actual.size();
      out["warnings"] = warnings;
      const fs::path p = out_dir / "metrics.json";
      std::ofstream os(p);
      os << out.dump(2) << '\n';
      outputs.push_back(p.string());
      write_run_json(out_dir, "evaluate", argv_copy, nullptr, outputs);
      std::cout << out.dump(2) << '\n';
      return 0;
    }

    if (cmd_grid->parsed()) {
      hops::Dataset ds = load_dataset();
      const auto& records = zone_records(ds, grid.zone);
      hops::VariableSpec vspec = hops::VariableSpec::from_key(grid.spec, 0, 1);
      hops::ExperimentProtocol proto;
      proto.solver = solver_from(grid);
      proto.threads = common.threads;
      proto.guard = guard;
      std::vector<std::size_t> k2r = k2_csv.empty() ? std::vector<std::size_t>{}
                                                    : parse_size_list(k2_csv);
      std::vector<std::size_t> k3r = k3_csv.empty() ? std::vector<std::size_t>{}
                                                    : parse_size_list(k3_csv);
      if (k2r.empty()) k2r = hops::default_k2_range(vspec.column_count());
      if (k3r.empty()) k3r = hops::default_k3_range();
      hops::GridSearchResult res = hops::grid_search_k(records, vspec, k2r, k3r, proto);
      const fs::path p = out_dir / (grid.zone + "_grid.csv");
      std::ofstream os(p);
      os << "k2,k3,validation_mape_pct,iterations\n";
      for (const auto& c : res.cells) {
        os << c.k2 << ',' << c.k3 << ',' << c.validation_mape << ',' << c.iterations
           << '\n';
      }
      outputs.push_back(p.string());
      write_run_json(out_dir, "gridsearch", argv_copy, &ds, outputs);
      std::cout << "selected k2=" << res.k2 << " k3=" << res.k3 << '\n';
      return 0;
    }

    if (cmd_experiment->parsed()) {
      hops::Dataset ds = load_dataset();
      hops::ExperimentProtocol proto = hops::ExperimentProtocol::preset(preset);
      proto.solver = solver_from(exp_opts);
      proto.threads = common.threads;
      proto.guard = guard;
      if (!exp_k2_csv.empty()) proto.k2_range = parse_size_list(exp_k2_csv);
      if (!exp_k3_csv.empty()) proto.k3_range = parse_size_list(exp_k3_csv);
      if (has_fixed_k2) proto.fixed_k2 = exp_fixed_k2;
      if (has_fixed_k3) proto.fixed_k3 = exp_fixed_k3;
      if (!h_csv.empty()) proto.h_range = parse_size_list(h_csv);
      if (!d_csv.empty()) proto.d_range = parse_size_list(d_csv);

      hops::ExperimentReport report =
          hops::run_experiment(ds, pick_zones(common, ds), proto);

      const fs::path rc = out_dir / "report.csv";
      {
        std::ofstream os(rc);
        report.write_csv(os);
      }
      outputs.push_back(rc.string());
      const fs::path rj = out_dir / "report.json";
      {
        std::ofstream os(rj);
        report.write_json(os);
      }
      outputs.push_back(rj.string());
      if (plot_data) {
        const fs::path pp = out_dir / "plot_data.csv";
        std::ofstream os(pp);
        report.write_plot_csv(os);
        outputs.push_back(pp.string());
      }
      for (const auto& z : report.zones) {
        if (!z.ok) continue;
        const fs::path p = out_dir / (z.zone + "_predictions.csv");
        std::ofstream os(p);
        os << "date,hour,actual,predicted\n";
        char buf[128];
        for (std::size_t i = 0; i < z.stamps.size(); ++i) {
          std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u,%u,%.17g,%.17g\n",
                        z.stamps[i].year, z.stamps[i].month, z.stamps[i].day,
                        z.stamps[i].hour, z.actual[i], z.predicted[i]);
          os << buf;
        }
        outputs.push_back(p.string());
      }
      write_run_json(out_dir, "experiment", argv_copy, &ds, outputs);
      {
        std::ostringstream os;
        report.write_csv(os);
        std::cout << os.str();
      }
      return report.partial ? 2 : 0;
    }
  } catch (const hops::Error& e) {
    json err;
    err["error"]["code"] = e.code();
    err["error"]["message"] = e.what();
    std::cerr << err.dump() << '\n';
    std::error_code ec;
    if (fs::exists(out_dir, ec)) {
      std::ofstream os(out_dir / "error.json");
      os << err.dump(2) << '\n';
    }
    return 1;
  } catch (const std::exception& e) {
    json err;
    err["error"]["code"] = "cli.unexpected";
    err["error"]["message"] = e.what();
    std::cerr << err.dump() << '\n';
    return 1;
  }
  return 0;
}
