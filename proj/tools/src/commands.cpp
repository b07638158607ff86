// Copyright 2026 The ibsplit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>

#include "ibsplit/cascade/cascade.hpp"
#include "ibsplit/common/error.hpp"
#include "ibsplit/data/csv.hpp"
#include "ibsplit/data/dataset.hpp"
#include "ibsplit/data/synth.hpp"
#include "ibsplit/infoplane/infoplane.hpp"
#include "ibsplit/mi/discrete.hpp"
#include "ibsplit/mi/gcmi.hpp"
#include "ibsplit/mi/kde.hpp"
#include "ibsplit/sim/simulator.hpp"

namespace ibsplit::cli {

namespace {

data::DatasetSchema schema_from_section(const nlohmann::json& s) {
  data::DatasetSchema schema = data::synth_schema(data::SynthConfig{});
  if (s.contains("features")) {
    schema.feature_columns = s.at("features").get<std::vector<std::string>>();
  }
  if (s.contains("target")) {
    schema.target_column = s.at("target").get<std::string>();
  }
  if (s.contains("run_column")) {
    schema.run_column = s.at("run_column").get<std::string>();
  }
  if (s.contains("t_len")) schema.t_len = s.at("t_len").get<std::size_t>();
  if (s.contains("classes")) {
    schema.n_classes = s.at("classes").get<std::size_t>();
  }
  return schema;
}

nlohmann::json schema_echo(const data::DatasetSchema& schema,
                           double test_fraction) {
  nlohmann::json j;
  j["features"] = schema.feature_columns;
  j["target"] = schema.target_column;
  j["run_column"] = schema.run_column;
  j["t_len"] = schema.t_len;
  j["classes"] = schema.n_classes;
  j["test_fraction"] = test_fraction;
  return j;
}

double section_double(const nlohmann::json& s, const char* key,
                      double fallback) {
  return s.contains(key) ? s.at(key).get<double>() : fallback;
}

std::size_t section_size(const nlohmann::json& s, const char* key,
                         std::size_t fallback) {
  return s.contains(key) ? s.at(key).get<std::size_t>() : fallback;
}

}  // namespace

int cmd_synth(const GlobalArgs& global, const nlohmann::json& config) {
  const std::filesystem::path out = require_out_dir(global);
  nlohmann::json section = config_section(config, "synth");
  section["seed"] = resolve_seed(global, config, section);
  const data::SynthConfig cfg = data::synth_config_from_json(section);

  const data::SynthDataset dataset = data::synth_generate(cfg);
  data::write_synth(dataset, out / "data.csv", out / "synth_sidecar.json");
  write_effective_config(out, "synth", cfg.seed,
                         data::synth_config_to_json(cfg));

  std::cout << "wrote " << (out / "data.csv").string() << " ("
            << dataset.rows.target.size() << " rows, oracle MI "
            << data::format_double(dataset.oracle_mi_bits) << " bits)\n";
  return 0;
}

int cmd_train(const GlobalArgs& global, const nlohmann::json& config,
              const TrainFlags& flags) {
  const std::filesystem::path out = require_out_dir(global);
  const nlohmann::json section = config_section(config, "train");
  const std::uint64_t seed = resolve_seed(global, config, section);
  const std::filesystem::path data_path =
      resolve_path(flags.data, section, "data", true, "--data");

  const data::DatasetSchema schema = schema_from_section(section);
  data::SplitConfig split_cfg;
  split_cfg.test_fraction = section_double(section, "test_fraction", 0.1);
  split_cfg.seed = seed;

  nlohmann::json cascade_json = section.contains("cascade")
                                    ? section.at("cascade")
                                    : nlohmann::json::object();
  if (global.seed_set || !cascade_json.contains("seed")) {
    cascade_json["seed"] = seed;
  }
  const cascade::CascadeConfig ccfg =
      cascade::CascadeConfig::from_json(cascade_json);

  cascade::OrderingConfig ocfg;
  if (section.contains("ordering")) {
    const nlohmann::json& o = section.at("ordering");
    ocfg.accuracy_slack = section_double(o, "accuracy_slack", 0.02);
    ocfg.bits_slack = section_double(o, "bits_slack", 0.2);
    ocfg.min_accuracy_gap = section_double(o, "min_accuracy_gap", 0.0);
  }

  const data::SplitDataset sd =
      data::load_split_csv(data_path, schema, split_cfg);
  std::cout << "dataset: " << sd.train.size() << " train / " << sd.test.size()
            << " test windows, T=" << sd.train.t_len
            << ", D=" << sd.train.n_features
            << ", K=" << sd.train.n_classes << "\n";

  cascade::CascadeTrainer trainer(sd.train, ccfg);
  trainer.train_phase1();
  cascade::save_cascade(trainer.model(), out / "phase1_checkpoint.json");
  const auto& h1 = trainer.model().history;
  std::cout << "phase 1: " << h1.loss_phase1.size() << " epochs, loss "
            << data::format_double(h1.loss_phase1.back()) << ", accuracy "
            << data::format_double(h1.acc_phase1.back()) << "\n";

  trainer.augment();
  trainer.train_phase2();
  cascade::save_cascade(trainer.model(), out / "cascade_checkpoint.json");
  const auto& h2 = trainer.model().history;
  std::cout << "phase 2: " << h2.loss_phase2.size() << " epochs, loss "
            << data::format_double(h2.loss_phase2.back()) << ", accuracy "
            << data::format_double(h2.acc_phase2.back()) << "\n";

  infoplane::ActivationsFile activations;
  activations.probe = trainer.probe();
  activations.probe_indices = trainer.probe_indices();
  activations.records = trainer.take_records();
  infoplane::save_activations(activations, out / "activations.bin");

  const cascade::OrderingReport report =
      cascade::verify_ordering(trainer.model(), sd.test, ocfg);
  write_json_file(report.to_json(), out / "ordering_report.json");

  nlohmann::json effective = section;
  effective["cascade"] = ccfg.to_json();
  effective["test_fraction"] = split_cfg.test_fraction;
  nlohmann::json schema_json = schema_echo(schema, split_cfg.test_fraction);
  for (auto& [key, value] : schema_json.items()) effective[key] = value;
  effective.erase("seed");
  effective.erase("ordering");
  effective["ordering"] = {{"accuracy_slack", ocfg.accuracy_slack},
                           {"bits_slack", ocfg.bits_slack},
                           {"min_accuracy_gap", ocfg.min_accuracy_gap}};
  write_effective_config(out, "train", seed, effective);

  std::cout << "ordering: informative acc "
            << data::format_double(report.informative.accuracy) << " / I(X;z) "
            << data::format_double(report.informative.i_xz_bits)
            << " bits; compressed acc "
            << data::format_double(report.compressed.accuracy) << " / I(X;z') "
            << data::format_double(report.compressed.i_xz_bits) << " bits; "
            << (report.pass ? "pass" : "FAIL") << "\n";
  if (!report.pass) {
    std::cerr << "ordering verification failed (see "
              << (out / "ordering_report.json").string() << ")\n";
    return 1;
  }
  return 0;
}

int cmd_analyze(const GlobalArgs& global, const nlohmann::json& config,
                const AnalyzeFlags& flags) {
  const std::filesystem::path out = require_out_dir(global);
  const nlohmann::json section = config_section(config, "analyze");
  const std::uint64_t seed = resolve_seed(global, config, section);
  const std::filesystem::path records_path =
      resolve_path(flags.records, section, "records", true, "--records");

  infoplane::PlaneConfig pcfg;
  pcfg.tau = section_size(section, "tau", 5);
  pcfg.threshold_bits = section_double(section, "threshold_bits", 3.0);
  pcfg.k_max = section_size(section, "k_max", 6);
  infoplane::CurveConfig curve_cfg;
  curve_cfg.phase = static_cast<int>(section_size(section, "phase", 1));
  curve_cfg.layer = section_size(section, "layer", 1);
  curve_cfg.tau = pcfg.tau;

  const infoplane::ActivationsFile af =
      infoplane::load_activations(records_path);
  const mi::SampleMatrix x_flat = infoplane::flatten_windows(af.probe.x);

  const infoplane::RedundancyReport redundancy =
      infoplane::redundancy_truncation(af.records, x_flat, pcfg.threshold_bits,
                                       pcfg.k_max, pcfg.max_dim_fraction);
  write_json_file(redundancy.to_json(), out / "redundancy.json");
  pcfg.k_star = redundancy.k_star;

  const infoplane::PlaneResult plane =
      infoplane::compute_plane(af.records, x_flat, af.probe.y, pcfg);
  infoplane::export_curves({plane.points, {}}, out / "plane.csv");

  const infoplane::CurveResult info_curve =
      infoplane::temporal_info_curve(af.records, af.probe.y, curve_cfg);
  infoplane::export_curves({{}, info_curve.points},
                           out / "temporal_info.csv");

  const infoplane::CurveResult compression =
      infoplane::temporal_compression_curve(af.records, x_flat,
                                            af.probe.x.dim(), curve_cfg);
  infoplane::export_curves({{}, compression.points},
                           out / "temporal_compression.csv");

  // Compression observation: early epoch = the highest mean-over-t surface
  // value within the first half of recorded epochs; compare to the final
  // epoch. The sign is reported, never asserted here.
  std::map<std::size_t, std::pair<double, std::size_t>> by_epoch;
  for (const auto& p : compression.points) {
    auto& [sum, count] = by_epoch[p.epoch];
    sum += p.value_bits;
    ++count;
  }
  std::vector<std::pair<std::size_t, double>> epoch_means;
  for (const auto& [epoch, sc] : by_epoch) {
    epoch_means.emplace_back(epoch, sc.first / static_cast<double>(sc.second));
  }
  nlohmann::json summary;
  if (epoch_means.size() >= 2) {
    const std::size_t half = (epoch_means.size() + 1) / 2;
    std::size_t early_i = 0;
    for (std::size_t i = 1; i < half; ++i) {
      if (epoch_means[i].second > epoch_means[early_i].second) early_i = i;
    }
    const auto& early = epoch_means[early_i];
    const auto& final_epoch = epoch_means.back();
    const double diff = early.second - final_epoch.second;
    summary["early_epoch"] = early.first;
    summary["early_mean_bits"] = early.second;
    summary["final_epoch"] = final_epoch.first;
    summary["final_mean_bits"] = final_epoch.second;
    summary["mean_difference_bits"] = diff;
    summary["compression_observed"] = diff > 0.0;
    summary["activation"] = "tanh";
  } else {
    summary["note"] = "fewer than 2 epochs recorded; no comparison";
  }

  nlohmann::json report;
  report["k_star"] = plane.k_star;
  report["redundancy"] = redundancy.to_json();
  report["plane_flags"] = plane.flags;
  report["plane_points"] = plane.points.size();
  report["temporal_info_flags"] = info_curve.flags;
  report["compression_flags"] = compression.flags;
  report["compression_summary"] = summary;
  write_json_file(report, out / "analysis_report.json");

  nlohmann::json effective;
  effective["tau"] = pcfg.tau;
  effective["threshold_bits"] = pcfg.threshold_bits;
  effective["k_max"] = pcfg.k_max;
  effective["phase"] = curve_cfg.phase;
  effective["layer"] = curve_cfg.layer;
  write_effective_config(out, "analyze", seed, effective);

  std::cout << "plane: " << plane.points.size() << " points (k*="
            << plane.k_star << "); temporal surfaces: "
            << info_curve.points.size() << " + " << compression.points.size()
            << " cells\n";
  if (summary.contains("mean_difference_bits")) {
    std::cout << "compression: early epoch "
              << summary["early_epoch"].get<std::size_t>() << " minus final "
              << "epoch mean difference "
              << data::format_double(
                     summary["mean_difference_bits"].get<double>())
              << " bits\n";
  }
  return 0;
}

int cmd_simulate(const GlobalArgs& global, const nlohmann::json& config,
                 const SimulateFlags& flags) {
  const std::filesystem::path out = require_out_dir(global);
  const nlohmann::json section = config_section(config, "simulate");
  const std::uint64_t seed = resolve_seed(global, config, section);
  const std::filesystem::path checkpoint_path = resolve_path(
      flags.checkpoint, section, "checkpoint", true, "--checkpoint");
  const std::filesystem::path data_path =
      resolve_path(flags.data, section, "data", true, "--data");

  nlohmann::json link_json = section.contains("link")
                                 ? section.at("link")
                                 : nlohmann::json::object();
  if (global.seed_set || !link_json.contains("seed")) {
    link_json["seed"] = seed;
  }
  sim::SimConfig scfg;
  scfg.link = sim::LinkModel::from_json(link_json);
  if (section.contains("policy")) {
    scfg.policy = sim::OrchestratorPolicy::from_json(section.at("policy"));
  }
  scfg.steps = section_size(section, "steps", 1000);
  std::string mode_rule = flags.mode;
  if (mode_rule.empty()) {
    mode_rule = section.contains("mode_rule")
                    ? section.at("mode_rule").get<std::string>()
                    : "adaptive";
  }
  scfg.mode_rule = sim::mode_rule_from_name(mode_rule);
  scfg.validate();

  const cascade::CascadeModel model = cascade::load_cascade(checkpoint_path);
  const data::DatasetSchema schema = schema_from_section(section);
  data::SplitConfig split_cfg;
  split_cfg.test_fraction = section_double(section, "test_fraction", 0.1);
  split_cfg.seed = seed;
  const data::SplitDataset sd =
      data::load_split_csv(data_path, schema, split_cfg);

  const sim::SimTrace trace = sim::run(model, sd.test, scfg);
  sim::write_trace_csv(trace, out / "trace.csv");
  write_json_file(trace.summary_json(), out / "summary.json");

  nlohmann::json effective = scfg.to_json();
  nlohmann::json schema_json = schema_echo(schema, split_cfg.test_fraction);
  for (auto& [key, value] : schema_json.items()) effective[key] = value;
  write_effective_config(out, "simulate", seed, effective);

  std::cout << "simulated " << trace.steps.size() << " steps: "
            << trace.aggregates.total_bytes << " bytes, accuracy "
            << data::format_double(trace.aggregates.accuracy) << ", "
            << trace.aggregates.switch_count << " switches\n";
  return 0;
}

namespace {

std::vector<int> to_labels(const std::vector<double>& values,
                           const std::string& role) {
  std::vector<int> labels(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double r = std::round(values[i]);
    if (std::abs(values[i] - r) > 1e-9) {
      throw DataError("column with role '" + role +
                      "' must hold integer labels; row " +
                      std::to_string(i + 1) + " has " +
                      data::format_double(values[i]));
    }
    labels[i] = static_cast<int>(r);
  }
  return labels;
}

struct RoleData {
  mi::SampleMatrix x;
  mi::SampleMatrix y;
  mi::SampleMatrix z;
  std::vector<double> x_first;  // first x column (plugin)
  std::vector<double> y_first;  // first y column (plugin / kde labels)
  std::size_t x_cols = 0;
  std::size_t y_cols = 0;
  std::size_t z_cols = 0;
};

RoleData parse_roles(const data::CsvTable& table) {
  std::vector<std::size_t> x_idx, y_idx, z_idx;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    const std::string& role = table.columns[c];
    if (role == "x") {
      x_idx.push_back(c);
    } else if (role == "y") {
      y_idx.push_back(c);
    } else if (role == "z") {
      z_idx.push_back(c);
    } else if (role != "ignore") {
      throw ConfigError("estimate input column " + std::to_string(c + 1) +
                        " has role '" + role +
                        "' (expected x, y, z or ignore)");
    }
  }
  const std::size_t n = table.n_rows();
  if (n < 2) throw DataError("estimate input needs at least 2 data rows");

  RoleData data;
  data.x_cols = x_idx.size();
  data.y_cols = y_idx.size();
  data.z_cols = z_idx.size();
  auto fill = [&](const std::vector<std::size_t>& idx) {
    mi::SampleMatrix m(static_cast<Eigen::Index>(n),
                       static_cast<Eigen::Index>(idx.size()));
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < idx.size(); ++c) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            table.numeric(r, idx[c]);
      }
    }
    return m;
  };
  data.x = fill(x_idx);
  data.y = fill(y_idx);
  data.z = fill(z_idx);
  if (!x_idx.empty()) {
    data.x_first.assign(data.x.col(0).data(),
                        data.x.col(0).data() + data.x.rows());
  }
  if (!y_idx.empty()) {
    data.y_first.assign(data.y.col(0).data(),
                        data.y.col(0).data() + data.y.rows());
  }
  return data;
}

}  // namespace

int cmd_estimate(const GlobalArgs& global, const nlohmann::json& config,
                 const EstimateFlags& flags) {
  const nlohmann::json section = config_section(config, "estimate");
  const std::uint64_t seed = resolve_seed(global, config, section);
  const std::filesystem::path input_path =
      resolve_path(flags.input, section, "input", true, "--input");

  std::vector<std::string> estimators = flags.estimators;
  if (estimators.empty() && section.contains("estimators")) {
    estimators = section.at("estimators").get<std::vector<std::string>>();
  }
  if (estimators.empty()) {
    throw ConfigError(
        "no estimator requested; pass --estimator NAME (binning, plugin, "
        "kde, gcmi, conditional_gcmi)");
  }

  mi::BinningConfig bin_cfg;
  bin_cfg.bins_per_dim = section_size(section, "bins", 30);
  mi::KdeConfig kde_cfg;
  kde_cfg.bandwidth = section_double(section, "bandwidth", 0.0);

  const data::CsvTable table = data::read_csv(input_path);
  const RoleData roles = parse_roles(table);

  auto need = [&](std::size_t have, std::size_t min_cols, const char* role,
                  const std::string& estimator) {
    if (have < min_cols) {
      throw ConfigError("estimator '" + estimator + "' needs at least " +
                        std::to_string(min_cols) + " column(s) with role '" +
                        role + "'");
    }
  };

  nlohmann::json all = nlohmann::json::array();
  for (const std::string& name : estimators) {
    mi::MIEstimate est;
    if (name == "plugin") {
      need(roles.x_cols, 1, "x", name);
      need(roles.y_cols, 1, "y", name);
      est = mi::plugin_discrete_mi(to_labels(roles.x_first, "x"),
                                   to_labels(roles.y_first, "y"));
    } else if (name == "binning") {
      need(roles.x_cols, 1, "x", name);
      need(roles.y_cols, 1, "y", name);
      est = mi::binning_mi(roles.x, roles.y, bin_cfg);
    } else if (name == "kde") {
      need(roles.x_cols, 1, "x", name);
      need(roles.y_cols, 1, "y", name);
      est = mi::kde_mi_label(to_labels(roles.y_first, "y"), roles.x, kde_cfg);
    } else if (name == "gcmi") {
      need(roles.x_cols, 1, "x", name);
      need(roles.y_cols, 1, "y", name);
      est = mi::gcmi(roles.x, roles.y);
    } else if (name == "conditional_gcmi") {
      need(roles.x_cols, 1, "x", name);
      need(roles.y_cols, 1, "y", name);
      need(roles.z_cols, 1, "z", name);
      est = mi::conditional_gcmi(roles.x, roles.y, roles.z);
    } else {
      throw ConfigError("unknown estimator '" + name +
                        "' (expected binning, plugin, kde, gcmi or "
                        "conditional_gcmi)");
    }
    const nlohmann::json j = est.to_json();
    std::cout << j.dump() << "\n";
    all.push_back(j);
  }

  if (!global.out_dir.empty()) {
    const std::filesystem::path out = require_out_dir(global);
    write_json_file(all, out / "estimates.json");
    nlohmann::json effective;
    effective["estimators"] = estimators;
    effective["bins"] = bin_cfg.bins_per_dim;
    effective["bandwidth"] = kde_cfg.bandwidth;
    write_effective_config(out, "estimate", seed, effective);
  }
  return 0;
}

}  // namespace ibsplit::cli
