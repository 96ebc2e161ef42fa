#pragma once

// Experiment harness: the three-dataset reproduction (dataset table, group
// skew per repair family, histograms) and the fairness/accuracy trade-off
// sweep (train on repaired data, test on untouched and on repaired data).

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairlab/dataset.hpp"
#include "fairlab/errors.hpp"
#include "fairlab/io.hpp"
#include "fairlab/logistic.hpp"
#include "fairlab/metrics.hpp"
#include "fairlab/repair_config.hpp"

namespace fairlab {

struct ExperimentConfig {
  std::vector<DatasetSpec> datasets;
  std::vector<RepairConfig> repairs;
  std::uint64_t master_seed = 42;
  double test_fraction = 0.2;
  std::size_t bins = 50;
  FitConfig fit;
};

// DIR at 0.3/0.5/1.0, the three weighting methods, and LFR with defaults.
inline std::vector<RepairConfig> default_repairs(std::uint64_t master_seed) {
  LfrParams lfr;
  lfr.seed = derive_seed(master_seed, 200);
  return {DirRepair{0.3}, DirRepair{0.5}, DirRepair{1.0}, Reweighing{}, FairBalance{false}, FairBalance{true},
          LfrRepair{lfr}};
}

inline ExperimentConfig default_experiment(std::uint64_t master_seed) {
  ExperimentConfig cfg;
  cfg.master_seed = master_seed;
  cfg.datasets = builtin_datasets::all(master_seed);
  cfg.repairs = default_repairs(master_seed);
  return cfg;
}

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.datasets.empty()) throw InvalidConfig("experiment needs at least one dataset");
  if (cfg.repairs.empty()) throw InvalidConfig("experiment needs at least one repair");
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0)) throw InvalidConfig("test_fraction must lie in (0, 1)");
  if (cfg.bins < 1) throw InvalidConfig("bins must be at least 1");
  for (const auto& d : cfg.datasets) {
    try {
      validate(d);
    } catch (const InvalidSpec& e) {
      throw InvalidConfig(e.what());
    }
  }
  for (const auto& r : cfg.repairs) validate(r);
  try {
    validate(cfg.fit);
  } catch (const InvalidArgument& e) {
    throw InvalidConfig(e.what());
  }
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    cfg.master_seed = j.value("master_seed", std::uint64_t{42});
    cfg.test_fraction = j.value("test_fraction", 0.2);
    cfg.bins = j.value("bins", std::size_t{50});
    if (j.contains("fit")) cfg.fit = j.at("fit").get<FitConfig>();
    if (j.contains("datasets")) {
      cfg.datasets = j.at("datasets").get<std::vector<DatasetSpec>>();
    } else {
      cfg.datasets = builtin_datasets::all(cfg.master_seed);
    }
    if (!j.contains("repairs")) throw InvalidConfig("experiment config: 'repairs' is required");
    for (const auto& r : j.at("repairs")) cfg.repairs.push_back(repair_config_from_json(r));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("experiment config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

// Renders a weight-based repair as data so skew and histograms can be taken.
inline Dataset materialize(const RepairConfig& config, const Dataset& repaired, std::uint64_t seed) {
  return is_weighting(config) ? resample_by_weight(repaired, seed) : repaired;
}

// ---------------------------------------------------------------------------
// Reproduction of the dataset table and the three repair tables.

struct GroupSummary {
  int group_id = 0;
  std::size_t size = 0;
  double mean = 0.0;
  double std = 0.0;
  double p_favorable = 0.0;
};

struct TransformResult {
  std::string key;    // directory-safe name, e.g. "dir-0.5"
  std::string label;  // table label, e.g. "DIR(0.5)"
  std::string table;  // "dir", "eo" or "sp"
  Dataset data;       // materialized transform
  MetricsReport metrics;
  double distortion = 0.0;
};

struct DatasetResult {
  DatasetSpec spec;
  Dataset original;
  std::vector<GroupSummary> groups;
  MetricsReport metrics;
  std::vector<TransformResult> transforms;

  const TransformResult& transform(const std::string& key) const {
    for (const auto& t : transforms) {
      if (t.key == key) return t;
    }
    throw InvalidArgument("no transform '" + key + "' for dataset " + spec.name);
  }
};

struct Reproduction {
  std::uint64_t master_seed = 0;
  std::vector<DatasetResult> datasets;
};

inline std::vector<GroupSummary> summarize_groups(const Dataset& data, const DatasetSpec& spec) {
  std::vector<GroupSummary> out;
  for (const auto& gs : spec.groups) {
    GroupSummary s;
    s.group_id = gs.group_id;
    double sum = 0.0, fav = 0.0;
    for (const auto& r : data.records) {
      if (r.g != gs.group_id) continue;
      ++s.size;
      sum += r.v;
      fav += r.y;
    }
    if (s.size > 0) {
      s.mean = sum / static_cast<double>(s.size);
      double ss = 0.0;
      for (const auto& r : data.records) {
        if (r.g == gs.group_id) ss += (r.v - s.mean) * (r.v - s.mean);
      }
      s.std = s.size > 1 ? std::sqrt(ss / static_cast<double>(s.size - 1)) : 0.0;
      s.p_favorable = fav / static_cast<double>(s.size);
    }
    out.push_back(s);
  }
  return out;
}

inline std::string table_of(const RepairConfig& c) {
  if (std::holds_alternative<DirRepair>(c)) return "dir";
  if (std::holds_alternative<LfrRepair>(c)) return "sp";
  return "eo";
}

inline DatasetResult run_dataset(const DatasetSpec& spec, const std::vector<RepairConfig>& repairs) {
  DatasetResult res;
  res.spec = spec;
  res.original = generate(spec);
  res.groups = summarize_groups(res.original, spec);
  res.metrics = compute_report(res.original);
  for (std::size_t i = 0; i < repairs.size(); ++i) {
    const auto& cfg = repairs[i];
    TransformResult t;
    t.key = slug(cfg);
    t.label = describe(cfg);
    t.table = table_of(cfg);
    auto repaired = apply_repair(cfg, res.original);
    t.data = materialize(cfg, repaired.data, derive_seed(spec.seed, 1000 + i));
    t.data.provenance = spec.name + "-" + t.key;
    t.metrics = compute_report(t.data);
    // Weight-based repairs are compared through their weights directly, so
    // resampling noise does not enter the distortion.
    t.distortion = is_weighting(cfg) ? distortion(res.original, repaired.data, true)
                                     : distortion(res.original, t.data);
    res.transforms.push_back(std::move(t));
  }
  return res;
}

inline Reproduction reproduce(std::uint64_t master_seed) {
  Reproduction rep;
  rep.master_seed = master_seed;
  const auto repairs = default_repairs(master_seed);
  for (const auto& spec : builtin_datasets::all(master_seed)) rep.datasets.push_back(run_dataset(spec, repairs));
  return rep;
}

// ---------------------------------------------------------------------------
// Trade-off sweep.

struct ReportRow {
  std::string dataset;
  std::string repair;
  std::optional<std::string> error;
  MetricsReport metrics_original;
  MetricsReport metrics_transformed;
  std::optional<double> distortion;
  std::optional<double> accuracy_on_original_test;
  std::optional<double> accuracy_on_transformed_test;
  std::optional<double> eo_gap_of_predictions;
  std::optional<double> spd_of_predictions;
  // Same quantities for the classifier trained on the unrepaired partition.
  std::optional<double> baseline_accuracy_on_original_test;
  std::optional<double> baseline_eo_gap_of_predictions;
  std::optional<double> baseline_spd_of_predictions;
};

namespace detail {

inline double prediction_spd(const Dataset& test, const std::vector<int>& pred) {
  Dataset labelled = test;
  for (std::size_t i = 0; i < pred.size(); ++i) labelled.records[i].y = pred[i];
  return statistical_parity_difference(labelled);
}

struct Baseline {
  SplitPair split;
  MetricsReport metrics_original;
  std::optional<std::string> error;
  std::optional<double> accuracy, eo_gap, spd;
};

inline Baseline run_baseline(const DatasetSpec& spec, const ExperimentConfig& cfg, std::size_t dataset_index) {
  Baseline b;
  try {
    const auto original = generate(spec);
    b.metrics_original = compute_report(original);
    b.split = split(original, cfg.test_fraction, derive_seed(cfg.master_seed, 300 + dataset_index));
    const auto model = fit_logistic(b.split.train, cfg.fit);
    const auto pred = predict(model, b.split.test);
    const auto truth = outcomes(b.split.test);
    b.accuracy = accuracy(truth, pred);
    b.eo_gap = try_metric([&] { return equalized_odds_gap(truth, pred, groups(b.split.test)); });
    b.spd = try_metric([&] { return prediction_spd(b.split.test, pred); });
  } catch (const Error& e) {
    b.error = e.what();
  }
  return b;
}

}  // namespace detail

inline ReportRow run_sweep_row(const detail::Baseline& base, const DatasetSpec& spec, const RepairConfig& repair,
                               const ExperimentConfig& cfg, std::size_t row_index) {
  ReportRow row;
  row.dataset = spec.name;
  row.repair = describe(repair);
  row.metrics_original = base.metrics_original;
  row.baseline_accuracy_on_original_test = base.accuracy;
  row.baseline_eo_gap_of_predictions = base.eo_gap;
  row.baseline_spd_of_predictions = base.spd;
  if (base.error) {
    row.error = *base.error;
    return row;
  }
  try {
    const auto& train = base.split.train;
    const auto& test = base.split.test;
    const auto repaired = apply_repair(repair, train);
    const auto shown = materialize(repair, repaired.data, derive_seed(cfg.master_seed, 5000 + row_index));
    row.metrics_transformed = compute_report(shown);
    row.distortion = is_weighting(repair) ? distortion(train, repaired.data, true) : distortion(train, shown);

    // Curated test: the same repair applied to the test partition on its
    // own. A fitted LFR representation is reused rather than refitted.
    const Dataset curated = repaired.lfr_model
                                ? lfr_transform(*repaired.lfr_model, test, repaired.lfr_model->params.threshold)
                                : apply_repair(repair, test).data;

    const auto model = fit_logistic(repaired.data, cfg.fit);
    const auto pred = predict(model, test);
    const auto truth = outcomes(test);
    row.accuracy_on_original_test = accuracy(truth, pred);
    row.eo_gap_of_predictions = detail::try_metric([&] { return equalized_odds_gap(truth, pred, groups(test)); });
    row.spd_of_predictions = detail::try_metric([&] { return detail::prediction_spd(test, pred); });

    const auto curated_pred = predict(model, curated);
    std::vector<double> w;
    w.reserve(curated.size());
    for (const auto& r : curated.records) w.push_back(r.w);
    row.accuracy_on_transformed_test = weighted_accuracy(outcomes(curated), curated_pred, w);
  } catch (const Error& e) {
    row.error = e.what();
  }
  return row;
}

// Rows are independent; each row's randomness is derived from the master
// seed and its index, so the evaluation order cannot change results.
inline std::vector<ReportRow> run_tradeoff_sweep(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<ReportRow> rows;
  for (std::size_t d = 0; d < cfg.datasets.size(); ++d) {
    const auto base = detail::run_baseline(cfg.datasets[d], cfg, d);
    for (std::size_t r = 0; r < cfg.repairs.size(); ++r) {
      rows.push_back(run_sweep_row(base, cfg.datasets[d], cfg.repairs[r], cfg, d * cfg.repairs.size() + r));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Report serialization.

namespace detail {

inline std::string csv_field(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }

}  // namespace detail

inline void to_json(nlohmann::json& j, const ReportRow& r) {
  using detail::opt_json;
  j = {{"dataset", r.dataset},
       {"repair", r.repair},
       {"error", r.error ? nlohmann::json(*r.error) : nlohmann::json(nullptr)},
       {"failed", r.error.has_value()},
       {"metrics_original", r.metrics_original},
       {"metrics_transformed", r.metrics_transformed},
       {"distortion", opt_json(r.distortion)},
       {"accuracy_on_original_test", opt_json(r.accuracy_on_original_test)},
       {"accuracy_on_transformed_test", opt_json(r.accuracy_on_transformed_test)},
       {"eo_gap_of_predictions", opt_json(r.eo_gap_of_predictions)},
       {"spd_of_predictions", opt_json(r.spd_of_predictions)},
       {"baseline_accuracy_on_original_test", opt_json(r.baseline_accuracy_on_original_test)},
       {"baseline_eo_gap_of_predictions", opt_json(r.baseline_eo_gap_of_predictions)},
       {"baseline_spd_of_predictions", opt_json(r.baseline_spd_of_predictions)}};
}

inline std::string sweep_csv(const std::vector<ReportRow>& rows) {
  using detail::csv_field;
  std::ostringstream os;
  os << "dataset,repair,failed,phi_original,group_skew_transformed,distortion,accuracy_on_original_test,"
        "accuracy_on_transformed_test,eo_gap_of_predictions,spd_of_predictions,"
        "baseline_accuracy_on_original_test,baseline_eo_gap_of_predictions,baseline_spd_of_predictions\n";
  for (const auto& r : rows) {
    os << r.dataset << ',' << r.repair << ',' << (r.error ? 1 : 0) << ',' << csv_field(r.metrics_original.phi) << ','
       << csv_field(r.metrics_transformed.group_skew) << ',' << csv_field(r.distortion) << ','
       << csv_field(r.accuracy_on_original_test) << ',' << csv_field(r.accuracy_on_transformed_test) << ','
       << csv_field(r.eo_gap_of_predictions) << ',' << csv_field(r.spd_of_predictions) << ','
       << csv_field(r.baseline_accuracy_on_original_test) << ',' << csv_field(r.baseline_eo_gap_of_predictions)
       << ',' << csv_field(r.baseline_spd_of_predictions) << '\n';
  }
  return os.str();
}

inline void write_sweep(const std::vector<ReportRow>& rows, const std::filesystem::path& out_dir) {
  write_text_file(out_dir / "sweep.json", dump_json({{"rows", rows}}));
  write_text_file(out_dir / "sweep.csv", sweep_csv(rows));
}

inline nlohmann::json table1_json(const Reproduction& rep) {
  auto rows = nlohmann::json::array();
  for (const auto& d : rep.datasets) {
    auto groups = nlohmann::json::array();
    for (const auto& g : d.groups) {
      groups.push_back({{"group", g.group_id}, {"size", g.size}, {"mean", g.mean}, {"std", g.std},
                        {"p_favorable", g.p_favorable}});
    }
    rows.push_back({{"dataset", d.spec.name},
                    {"seed", d.spec.seed},
                    {"spec", d.spec},
                    {"groups", groups},
                    {"spd", detail::opt_json(d.metrics.spd)},
                    {"di", detail::opt_json(d.metrics.di)},
                    {"phi", detail::opt_json(d.metrics.phi)},
                    {"group_skew", detail::opt_json(d.metrics.group_skew)}});
  }
  return {{"master_seed", rep.master_seed}, {"rows", rows}};
}

inline std::string table1_csv(const Reproduction& rep) {
  using detail::csv_field;
  std::ostringstream os;
  os << "dataset,group,size,mean,std,p_favorable,spd,di,group_skew\n";
  for (const auto& d : rep.datasets) {
    for (const auto& g : d.groups) {
      os << d.spec.name << ',' << g.group_id << ',' << g.size << ',' << format_double(g.mean) << ','
         << format_double(g.std) << ',' << format_double(g.p_favorable) << ',' << csv_field(d.metrics.spd) << ','
         << csv_field(d.metrics.di) << ',' << csv_field(d.metrics.group_skew) << '\n';
    }
  }
  return os.str();
}

// One row per (dataset, method), starting with the untouched original.
inline std::vector<nlohmann::json> method_rows(const Reproduction& rep, const std::string& table) {
  std::vector<nlohmann::json> rows;
  auto row = [](const std::string& dataset, const std::string& method, const MetricsReport& m, double dist) {
    return nlohmann::json{{"dataset", dataset},
                          {"method", method},
                          {"group_skew", detail::opt_json(m.group_skew)},
                          {"distortion", dist},
                          {"spd", detail::opt_json(m.spd)},
                          {"di", detail::opt_json(m.di)},
                          {"phi", detail::opt_json(m.phi)}};
  };
  for (const auto& d : rep.datasets) {
    rows.push_back(row(d.spec.name, "original", d.metrics, 0.0));
    for (const auto& t : d.transforms) {
      if (t.table == table) rows.push_back(row(d.spec.name, t.label, t.metrics, t.distortion));
    }
  }
  return rows;
}

inline std::string method_csv(const std::vector<nlohmann::json>& rows) {
  std::ostringstream os;
  os << "dataset,method,group_skew,distortion,spd,di,phi\n";
  auto field = [](const nlohmann::json& x) { return x.is_null() ? std::string() : format_double(x.get<double>()); };
  for (const auto& r : rows) {
    os << r["dataset"].get<std::string>() << ',' << r["method"].get<std::string>() << ',' << field(r["group_skew"])
       << ',' << field(r["distortion"]) << ',' << field(r["spd"]) << ',' << field(r["di"]) << ',' << field(r["phi"])
       << '\n';
  }
  return os.str();
}

// Histograms per dataset share one range: [min, max] of v over the original
// and every transform.
inline void write_histograms(const DatasetResult& d, std::size_t bins, const std::filesystem::path& dir) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  auto extend = [&](const Dataset& data) {
    for (const auto& r : data.records) {
      lo = std::min(lo, r.v);
      hi = std::max(hi, r.v);
    }
  };
  extend(d.original);
  for (const auto& t : d.transforms) extend(t.data);
  if (!(lo < hi)) hi = lo + 1.0;

  auto emit = [&](const std::string& key, const Dataset& data) {
    for (int g : {0, 1}) {
      const auto values = values_of_group(data, g);
      const auto h = histogram(values, bins, lo, hi, g);
      write_text_file(dir / d.spec.name / key / (std::to_string(g) + ".json"), dump_json(h));
    }
  };
  emit("original", d.original);
  for (const auto& t : d.transforms) emit(t.key, t.data);
}

inline void write_reproduction(const Reproduction& rep, std::size_t bins, const std::filesystem::path& out_dir) {
  write_text_file(out_dir / "table1.json", dump_json(table1_json(rep)));
  write_text_file(out_dir / "table1.csv", table1_csv(rep));
  const std::pair<const char*, const char*> tables[] = {
      {"dir", "table2_dir"}, {"eo", "table3_eo"}, {"sp", "table4_sp"}};
  for (const auto& [table, file] : tables) {
    const auto rows = method_rows(rep, table);
    write_text_file(out_dir / (std::string(file) + ".json"),
                    dump_json({{"master_seed", rep.master_seed}, {"rows", rows}}));
    write_text_file(out_dir / (std::string(file) + ".csv"), method_csv(rows));
  }
  for (const auto& d : rep.datasets) write_histograms(d, bins, out_dir / "hist");
}

struct FullRun {
  Reproduction reproduction;
  std::vector<ReportRow> sweep;
};

// Full report tree: tables, histograms, and the default trade-off sweep.
inline FullRun reproduce_all(std::uint64_t master_seed, const std::filesystem::path& out_dir) {
  FullRun run;
  const auto cfg = default_experiment(master_seed);
  run.reproduction = reproduce(master_seed);
  write_reproduction(run.reproduction, cfg.bins, out_dir);
  run.sweep = run_tradeoff_sweep(cfg);
  write_sweep(run.sweep, out_dir);
  return run;
}

}  // namespace fairlab
