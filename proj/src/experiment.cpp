#include "hops/experiment.hpp"

#include "hops/model_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cctype>
#include <sstream>
#include <tuple>

#include "hops/error.hpp"
#include "hops/kernels.hpp"
#include "hops/linalg.hpp"
#include "hops/metrics.hpp"
#include "hops/reduction.hpp"
#include "hops/util.hpp"

namespace hops {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::size_t> rows_in_years(const DesignMatrix& design, YearSpan years,
                                       bool require_load) {
  std::vector<std::size_t> idx;
  for (std::size_t r = 0; r < design.stamps.size(); ++r) {
    if (!years.contains(design.stamps[r].year)) continue;
    if (require_load && !design.load[r]) continue;
    idx.push_back(r);
  }
  return idx;
}

std::vector<double> loads_at(const DesignMatrix& design, std::span<const std::size_t> idx) {
  std::vector<double> y;
  y.reserve(idx.size());
  for (std::size_t r : idx) y.push_back(*design.load[r]);
  return y;
}

Matrix gather_normalized(const Matrix& x, std::span<const std::size_t> idx,
                         const MinMaxNormalizer& nz) {
  Matrix out(idx.size(), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) nz.apply_row(x.row(idx[i]), out.row(i));
  return out;
}

// One training phase of a polynomial fit: normalized training design plus the
// decomposition shared by every embedding width tried on it.
struct HopsPhase {
  MinMaxNormalizer nz;
  Matrix xn_train;
  std::vector<double> y_train;
  Matrix stripped;  // training design without the trend column
  SvdResult svd;
  Fingerprint fp;
};

HopsPhase make_phase(const DesignMatrix& design, std::span<const std::size_t> train_idx) {
  HopsPhase phase;
  phase.nz = MinMaxNormalizer::fit_rows(design.x, train_idx);
  phase.xn_train = gather_normalized(design.x, train_idx, phase.nz);
  phase.y_train = loads_at(design, train_idx);
  phase.stripped = design.trend_column ? phase.xn_train.drop_column(*design.trend_column)
                                       : phase.xn_train;
  phase.svd = thin_svd(phase.stripped);
  phase.fp = phase.stripped.fingerprint();
  return phase;
}

PolySpec make_poly_spec(std::size_t input_dim, std::optional<std::size_t> trend_col,
                        std::size_t k2, std::size_t k3) {
  PolySpec spec;
  spec.input_dim = input_dim;
  spec.max_order = 3;
  spec.embed_dims = {input_dim, k2, k3};
  spec.trend_column = trend_col;
  return spec;
}

std::pair<PolyModel, SolverTrace> fit_phase(const HopsPhase& phase,
                                            const DesignMatrix& design, std::size_t k2,
                                            std::size_t k3, const SolverConfig& solver) {
  PolySpec spec = make_poly_spec(phase.xn_train.cols(), design.trend_column, k2, k3);
  std::vector<ReductionMap> reductions;
  reductions.push_back(reduction_from_svd(phase.svd, k2, phase.fp));
  if (k3 > 0) {
    reductions.push_back(reduction_from_svd(phase.svd, k3, phase.fp));
  } else {
    reductions.emplace_back();
  }
  return fit_polycg(phase.xn_train, phase.y_train, spec, std::move(reductions), solver,
                    phase.nz);
}

// Batch prediction for normalized rows, routing the higher-order embeddings
// through apply_reduction so the out-of-sample guard is exercised.
std::vector<double> predict_poly(const PolyModel& model, const Matrix& xn,
                                 LeakageGuard guard) {
  std::vector<double> yhat(xn.rows(), model.bias);
  const auto& k = kern::ops();
  for (std::size_t r = 0; r < xn.rows(); ++r) {
    yhat[r] += k.dot(model.tensors[0].data(), xn.data() + r * xn.cols(), xn.cols());
  }
  Matrix stripped = model.spec.trend_column ? xn.drop_column(*model.spec.trend_column) : xn;
  std::vector<double> scratch;
  for (std::size_t order = 2; order <= model.spec.max_order; ++order) {
    if (model.spec.embed_dim(order) == 0) continue;
    Matrix z = apply_reduction(stripped, model.reductions[order - 2], guard);
    std::span<const double> tensor{model.tensors[order - 1]};
    for (std::size_t r = 0; r < xn.rows(); ++r) {
      yhat[r] += contract_power(tensor, order, z.row(r), scratch);
    }
  }
  return yhat;
}

struct GridOutcome {
  GridSearchResult result;
  std::size_t best_iterations = 0;
};

GridOutcome run_grid(const DesignMatrix& design, const ExperimentProtocol& protocol,
                     std::span<const std::size_t> k2_range,
                     std::span<const std::size_t> k3_range) {
  std::vector<std::size_t> train_idx = rows_in_years(design, protocol.train, true);
  std::vector<std::size_t> val_idx =
      rows_in_years(design, {protocol.validation_year, protocol.validation_year}, true);
  if (train_idx.empty() || val_idx.empty()) {
    throw DataError("experiment.splits", "empty training or validation split");
  }
  HopsPhase phase = make_phase(design, train_idx);
  Matrix xn_val = gather_normalized(design.x, val_idx, phase.nz);
  std::vector<double> y_val = loads_at(design, val_idx);

  const std::size_t source = phase.stripped.cols();
  std::vector<std::size_t> k2s = clamp_grid({k2_range.begin(), k2_range.end()}, source);
  std::vector<std::size_t> k3s = clamp_grid({k3_range.begin(), k3_range.end()}, source);
  if (k2s.empty() || k3s.empty()) {
    throw ConfigError("experiment.grid", "empty embedding search range");
  }

  GridOutcome out;
  auto& cells = out.result.cells;
  for (std::size_t k2 : k2s) {
    for (std::size_t k3 : k3s) cells.push_back({k2, k3, 0.0, 0});
  }
  parallel_for(cells.size(), protocol.effective_threads(), [&](std::size_t ci) {
    GridCell& cell = cells[ci];
    auto [model, trace] = fit_phase(phase, design, cell.k2, cell.k3, protocol.solver);
    std::vector<double> yhat = predict_poly(model, xn_val, LeakageGuard::off);
    cell.validation_mape = mape(y_val, yhat);
    cell.iterations = trace.iterations();
  });

  const GridCell* best = &cells.front();
  for (const auto& c : cells) {
    if (std::make_tuple(c.validation_mape, c.k3, c.k2) <
        std::make_tuple(best->validation_mape, best->k3, best->k2)) {
      best = &c;
    }
  }
  out.result.k2 = best->k2;
  out.result.k3 = best->k3;
  out.best_iterations = best->iterations;
  return out;
}

std::span<const HourlyRecord> slice_until_year(std::span<const HourlyRecord> records,
                                               int last_year) {
  std::size_t end = records.size();
  while (end > 0 && records[end - 1].ts.year > last_year) --end;
  return records.first(end);
}

void score_zone(ZoneResult& zr, const DesignMatrix& design,
                std::span<const std::size_t> test_idx, std::vector<double> yhat) {
  zr.actual = loads_at(design, test_idx);
  zr.predicted = std::move(yhat);
  zr.stamps.clear();
  for (std::size_t r : test_idx) zr.stamps.push_back(design.stamps[r]);
  zr.mape = mape(zr.actual, zr.predicted);
  zr.mse = mse(zr.actual, zr.predicted);
  zr.daily_peak = daily_peak_mape(zr.actual, zr.predicted, zr.stamps, &zr.warnings);
}

void run_zone(ZoneResult& zr, std::span<const HourlyRecord> records,
              const ExperimentProtocol& protocol) {
  const VariableSpec vspec = VariableSpec::from_key(
      protocol.variables, protocol.h_range.empty() ? 0 : protocol.h_range.back(),
      protocol.d_range.empty() ? 1 : protocol.d_range.back());

  if (protocol.kind == ModelKind::hops) {
    DesignMatrix design = build_design_matrix(records, vspec);
    for (auto& w : design.warnings) zr.warnings.push_back(w);

    std::size_t k2 = 0;
    std::size_t k3 = 0;
    const std::size_t source = design.trend_column ? design.x.cols() - 1 : design.x.cols();
    if (protocol.fixed_k2) {
      k2 = std::min(*protocol.fixed_k2, source);
      k3 = std::min(protocol.fixed_k3.value_or(0), source);
    } else {
      std::vector<std::size_t> k2r = protocol.k2_range.empty()
                                         ? default_k2_range(design.x.cols())
                                         : protocol.k2_range;
      std::vector<std::size_t> k3r =
          protocol.k3_range.empty() ? default_k3_range() : protocol.k3_range;
      GridOutcome grid = run_grid(design, protocol, k2r, k3r);
      k2 = grid.result.k2;
      k3 = grid.result.k3;
    }
    zr.k2 = k2;
    zr.k3 = k3;

    std::vector<std::size_t> retrain_idx = rows_in_years(design, protocol.retrain, true);
    if (retrain_idx.empty()) throw DataError("experiment.splits", "empty retraining split");
    HopsPhase phase = make_phase(design, retrain_idx);
    auto [model, trace] = fit_phase(phase, design, k2, k3, protocol.solver);
    zr.solver_iterations = trace.iterations();

    std::vector<std::size_t> test_idx =
        rows_in_years(design, {protocol.test_year, protocol.test_year}, true);
    if (test_idx.empty()) throw DataError("experiment.splits", "no test rows");
    Matrix xn_test = gather_normalized(design.x, test_idx, phase.nz);
    score_zone(zr, design, test_idx, predict_poly(model, xn_test, protocol.guard));
    return;
  }

  if (protocol.kind == ModelKind::benchmark) {
    LinearModel model = fit_linear(records, vspec, protocol.retrain);
    PredictionSet pred =
        predict_linear(model, records, {protocol.test_year, protocol.test_year});
    zr.stamps = std::move(pred.stamps);
    zr.predicted = std::move(pred.predicted);
    zr.actual.clear();
    for (const auto& a : pred.actual) {
      if (!a) throw DataError("experiment.actuals", "test row without actual load");
      zr.actual.push_back(*a);
    }
    zr.mape = mape(zr.actual, zr.predicted);
    zr.mse = mse(zr.actual, zr.predicted);
    zr.daily_peak = daily_peak_mape(zr.actual, zr.predicted, zr.stamps, &zr.warnings);
    return;
  }

  if (protocol.kind == ModelKind::recency) {
    RecencyProtocol rp{protocol.train, protocol.validation_year, protocol.retrain,
                       protocol.effective_threads()};
    RecencyFit fit = fit_recency(records, protocol.h_range, protocol.d_range, rp);
    zr.h = fit.h;
    zr.d = fit.d;
    PredictionSet pred =
        predict_linear(fit.model, records, {protocol.test_year, protocol.test_year});
    zr.stamps = std::move(pred.stamps);
    zr.predicted = std::move(pred.predicted);
    zr.actual.clear();
    for (const auto& a : pred.actual) {
      if (!a) throw DataError("experiment.actuals", "test row without actual load");
      zr.actual.push_back(*a);
    }
    zr.mape = mape(zr.actual, zr.predicted);
    zr.mse = mse(zr.actual, zr.predicted);
    zr.daily_peak = daily_peak_mape(zr.actual, zr.predicted, zr.stamps, &zr.warnings);
    return;
  }

  // rehops: search (h, d) with fixed embedding widths, then refit
  struct Cell {
    std::size_t h, d;
    double val_mape = 0.0;
  };
  std::vector<Cell> cells;
  for (std::size_t h : protocol.h_range) {
    for (std::size_t d : protocol.d_range) cells.push_back({h, d, 0.0});
  }
  if (cells.empty()) throw ConfigError("experiment.grid", "empty h/d search range");

  std::span<const HourlyRecord> search_records =
      slice_until_year(records, protocol.validation_year);
  parallel_for(cells.size(), protocol.effective_threads(), [&](std::size_t ci) {
    Cell& cell = cells[ci];
    DesignMatrix design =
        build_design_matrix(search_records, VariableSpec::rehops(cell.h, cell.d));
    std::vector<std::size_t> train_idx = rows_in_years(design, protocol.train, true);
    std::vector<std::size_t> val_idx = rows_in_years(
        design, {protocol.validation_year, protocol.validation_year}, true);
    if (train_idx.empty() || val_idx.empty()) {
      throw DataError("experiment.splits", "empty training or validation split");
    }
    HopsPhase phase = make_phase(design, train_idx);
    const std::size_t source = phase.stripped.cols();
    const std::size_t k2 = std::min(protocol.fixed_k2.value_or(60), source);
    const std::size_t k3 = std::min(protocol.fixed_k3.value_or(9), source);
    auto [model, trace] = fit_phase(phase, design, k2, k3, protocol.solver);
    Matrix xn_val = gather_normalized(design.x, val_idx, phase.nz);
    cell.val_mape = mape(loads_at(design, val_idx),
                         predict_poly(model, xn_val, LeakageGuard::off));
  });
  const Cell* best = &cells.front();
  for (const auto& c : cells) {
    if (std::make_tuple(c.val_mape, c.h, c.d) <
        std::make_tuple(best->val_mape, best->h, best->d)) {
      best = &c;
    }
  }
  zr.h = best->h;
  zr.d = best->d;

  DesignMatrix design = build_design_matrix(records, VariableSpec::rehops(zr.h, zr.d));
  std::vector<std::size_t> retrain_idx = rows_in_years(design, protocol.retrain, true);
  if (retrain_idx.empty()) throw DataError("experiment.splits", "empty retraining split");
  HopsPhase phase = make_phase(design, retrain_idx);
  const std::size_t source = phase.stripped.cols();
  zr.k2 = std::min(protocol.fixed_k2.value_or(60), source);
  zr.k3 = std::min(protocol.fixed_k3.value_or(9), source);
  auto [model, trace] = fit_phase(phase, design, zr.k2, zr.k3, protocol.solver);
  zr.solver_iterations = trace.iterations();
  std::vector<std::size_t> test_idx =
      rows_in_years(design, {protocol.test_year, protocol.test_year}, true);
  if (test_idx.empty()) throw DataError("experiment.splits", "no test rows");
  Matrix xn_test = gather_normalized(design.x, test_idx, phase.nz);
  score_zone(zr, design, test_idx, predict_poly(model, xn_test, protocol.guard));
}

}  // namespace

unsigned ExperimentProtocol::effective_threads() const {
  return threads == 0 ? default_thread_count() : threads;
}

ExperimentProtocol ExperimentProtocol::preset(std::string_view name) {
  const std::string key = lower(std::string(name));
  ExperimentProtocol p;
  p.label = key;
  if (key == "hops47" || key == "hops50" || key == "hops59" || key == "hops289") {
    p.kind = ModelKind::hops;
    p.variables = key == "hops289" ? "G1" : "HOPS" + key.substr(4);
  } else if (key == "g1" || key == "h1" || key == "g2" || key == "h2") {
    p.kind = ModelKind::benchmark;
    p.variables = key == "g1" ? "G1" : key == "h1" ? "H1" : key == "g2" ? "G2" : "H2";
  } else if (key == "recency" || key == "rehops") {
    p.kind = key == "recency" ? ModelKind::recency : ModelKind::rehops;
    p.variables = key == "recency" ? "RECENCY" : "REHOPS";
    p.retrain = {2013, 2014};
    for (std::size_t h = 0; h <= 24; ++h) p.h_range.push_back(h);
    for (std::size_t d = 1; d <= 7; ++d) p.d_range.push_back(d);
    if (p.kind == ModelKind::rehops) {
      p.fixed_k2 = 60;
      p.fixed_k3 = 9;
    }
  } else {
    std::string valid;
    for (const auto& n : preset_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw ConfigError("experiment.preset",
                      "unknown preset '" + std::string(name) + "' (valid: " + valid + ")");
  }
  return p;
}

const std::vector<std::string>& ExperimentProtocol::preset_names() {
  static const std::vector<std::string> names{"hops47",  "hops289", "hops50", "hops59",
                                              "rehops",  "g1",      "h1",     "g2",
                                              "h2",      "recency"};
  return names;
}

std::string ExperimentProtocol::describe() const {
  std::ostringstream os;
  os << "label=" << label << " variables=" << variables << " kind=" << static_cast<int>(kind) << " train="
     << train.first << ':' << train.last << " validate=" << validation_year
     << " retrain=" << retrain.first << ':' << retrain.last << " test=" << test_year;
  if (fixed_k2) os << " k2=" << *fixed_k2;
  if (fixed_k3) os << " k3=" << *fixed_k3;
  os << " max_iter=" << solver.max_iter << " tol=" << solver.tolerance << " alpha="
     << (solver.alpha_mode == AlphaMode::exact ? "exact" : "residual");
  return os.str();
}

std::uint64_t ExperimentProtocol::config_hash() const {
  std::string desc = describe();
  for (auto r : {k2_range, k3_range, h_range, d_range}) {
    for (std::size_t v : r) desc += ',' + std::to_string(v);
  }
  return fnv1a64(desc.data(), desc.size());
}

std::vector<std::size_t> default_k2_range(std::size_t input_dim) {
  if (input_dim == 289) return {12, 24, 36, 48, 60, 72, 84, 96, 108};
  return {20, 28, 36, 44, 52, 60, 68, 76, 84};
}

std::vector<std::size_t> default_k3_range() { return {0, 1, 5, 9, 13, 17, 21}; }

std::vector<std::size_t> clamp_grid(std::vector<std::size_t> range, std::size_t max_dim) {
  std::vector<std::size_t> out;
  for (std::size_t v : range) {
    const std::size_t c = std::min(v, max_dim);
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  }
  return out;
}

GridSearchResult grid_search_k(std::span<const HourlyRecord> records,
                               const VariableSpec& vspec,
                               std::span<const std::size_t> k2_range,
                               std::span<const std::size_t> k3_range,
                               const ExperimentProtocol& protocol) {
  std::span<const HourlyRecord> sliced =
      slice_until_year(records, protocol.validation_year);
  DesignMatrix design = build_design_matrix(sliced, vspec);
  return run_grid(design, protocol, k2_range, k3_range).result;
}

std::size_t ExperimentReport::averaged_zones() const {
  std::size_t n = 0;
  for (const auto& z : zones) {
    if (z.ok && z.zone != "TOTAL") ++n;
  }
  return n;
}

namespace {
double zone_mean(const ExperimentReport& r, double ZoneResult::* field) {
  double acc = 0.0;
  std::size_t n = 0;
  for (const auto& z : r.zones) {
    if (z.ok && z.zone != "TOTAL") {
      acc += z.*field;
      ++n;
    }
  }
  return n == 0 ? 0.0 : acc / static_cast<double>(n);
}
}  // namespace

double ExperimentReport::average_mape() const { return zone_mean(*this, &ZoneResult::mape); }
double ExperimentReport::average_mse() const { return zone_mean(*this, &ZoneResult::mse); }
double ExperimentReport::average_daily_peak() const {
  return zone_mean(*this, &ZoneResult::daily_peak);
}

void ExperimentReport::write_csv(std::ostream& os) const {
  os << "zone,mape_pct,mse,daily_peak_mape_pct,k2,k3,h,d,status\n";
  char buf[256];
  auto metric_row = [&](const ZoneResult& z) {
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%zu,%zu,%zu,%zu,%s\n",
                  z.zone.c_str(), z.mape, z.mse, z.daily_peak, z.k2, z.k3, z.h, z.d,
                  z.ok ? "ok" : "error");
    os << buf;
  };
  for (const auto& z : zones) {
    if (z.zone != "TOTAL") metric_row(z);
  }
  if (averaged_zones() > 0) {
    std::snprintf(buf, sizeof(buf), "AVERAGE,%.6f,%.6f,%.6f,,,,,ok\n", average_mape(),
                  average_mse(), average_daily_peak());
    os << buf;
  }
  for (const auto& z : zones) {
    if (z.zone == "TOTAL") metric_row(z);
  }
}

void ExperimentReport::write_json(std::ostream& os) const {
  char buf[256];
  os << "{\n  \"model\": \"" << model << "\",\n  \"protocol\": \"" << protocol
     << "\",\n  \"config_hash\": \"" << to_hex(config_hash) << "\",\n  \"partial\": "
     << (partial ? "true" : "false") << ",\n  \"zones\": [\n";
  for (std::size_t i = 0; i < zones.size(); ++i) {
    const auto& z = zones[i];
    std::snprintf(buf, sizeof(buf),
                  "    {\"zone\": \"%s\", \"ok\": %s, \"mape_pct\": %.10g, \"mse\": %.10g, "
                  "\"daily_peak_mape_pct\": %.10g, \"k2\": %zu, \"k3\": %zu, \"h\": %zu, "
                  "\"d\": %zu, \"iterations\": %zu, \"seconds\": %.3f",
                  z.zone.c_str(), z.ok ? "true" : "false", z.mape, z.mse, z.daily_peak,
                  z.k2, z.k3, z.h, z.d, z.solver_iterations, z.seconds);
    os << buf;
    if (!z.error.empty()) {
      os << ", \"error\": \"" << z.error << '"';
    }
    os << '}' << (i + 1 < zones.size() ? "," : "") << '\n';
  }
  os << "  ],\n";
  std::snprintf(buf, sizeof(buf),
                "  \"average\": {\"zones\": %zu, \"mape_pct\": %.10g, \"mse\": %.10g, "
                "\"daily_peak_mape_pct\": %.10g}\n}\n",
                averaged_zones(), average_mape(), average_mse(), average_daily_peak());
  os << buf;
}

void ExperimentReport::write_plot_csv(std::ostream& os) const {
  os << "zone,model,metric,value\n";
  char buf[160];
  for (const auto& z : zones) {
    if (!z.ok) continue;
    std::snprintf(buf, sizeof(buf), "%s,%s,mape_pct,%.6f\n", z.zone.c_str(), model.c_str(),
                  z.mape);
    os << buf;
    std::snprintf(buf, sizeof(buf), "%s,%s,mse,%.6f\n", z.zone.c_str(), model.c_str(), z.mse);
    os << buf;
    std::snprintf(buf, sizeof(buf), "%s,%s,daily_peak_mape_pct,%.6f\n", z.zone.c_str(),
                  model.c_str(), z.daily_peak);
    os << buf;
  }
}

std::pair<PolyModel, SolverTrace> fit_hops(std::span<const HourlyRecord> records,
                                           const VariableSpec& vspec,
                                           YearSpan train_years, std::size_t k2,
                                           std::size_t k3, const SolverConfig& solver) {
  DesignMatrix design = build_design_matrix(records, vspec);
  std::vector<std::size_t> train_idx = rows_in_years(design, train_years, true);
  if (train_idx.empty()) throw DataError("experiment.splits", "no training rows");
  HopsPhase phase = make_phase(design, train_idx);
  const std::size_t source = phase.stripped.cols();
  return fit_phase(phase, design, std::min(k2, source), std::min(k3, source), solver);
}

PredictionSet predict_saved(const SavedModel& saved,
                            std::span<const HourlyRecord> records, YearSpan years,
                            LeakageGuard guard) {
  if (!saved.is_poly()) {
    return predict_linear(std::get<LinearModel>(saved.model), records, years);
  }
  const PolyModel& model = std::get<PolyModel>(saved.model);
  DesignMatrix design = build_design_matrix(records, saved.variable_spec());
  std::vector<std::size_t> idx = rows_in_years(design, years, false);
  Matrix xn = gather_normalized(design.x, idx, model.normalizer);
  std::vector<double> yhat = predict_poly(model, xn, guard);
  PredictionSet out;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.stamps.push_back(design.stamps[idx[i]]);
    out.predicted.push_back(yhat[i]);
    out.actual.push_back(design.load[idx[i]]);
  }
  return out;
}

ExperimentReport run_experiment(const Dataset& dataset, std::vector<std::string> zones,
                                const ExperimentProtocol& protocol) {
  ExperimentReport report;
  report.model = protocol.label;
  report.protocol = protocol.describe();
  report.config_hash = protocol.config_hash();

  // alphabetical zone order with TOTAL last, matching the report tables
  std::sort(zones.begin(), zones.end());
  std::stable_partition(zones.begin(), zones.end(),
                        [](const std::string& z) { return z != "TOTAL"; });

  for (const auto& zone : zones) {
    ZoneResult zr;
    zr.zone = zone;
    const auto start = std::chrono::steady_clock::now();
    try {
      auto it = dataset.zones.find(zone);
      if (it == dataset.zones.end()) {
        throw DataError("experiment.zone", "zone '" + zone + "' not in dataset");
      }
      run_zone(zr, it->second, protocol);
      zr.ok = true;
    } catch (const Error& e) {
      zr.error = std::string(e.code()) + ": " + e.what();
      report.partial = true;
    }
    zr.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.zones.push_back(std::move(zr));
  }
  return report;
}

}  // namespace hops
