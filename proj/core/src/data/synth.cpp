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

#include "ibsplit/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "ibsplit/common/error.hpp"
#include "ibsplit/data/csv.hpp"
#include "ibsplit/mi/discrete.hpp"

namespace ibsplit::data {

void SynthConfig::validate() const {
  if (n_windows < 1) throw ConfigError("synth n_windows must be >= 1");
  if (runs < 1) throw ConfigError("synth runs must be >= 1");
  if (t_len < 1) throw ConfigError("synth t_len must be >= 1");
  if (n_features < 1) throw ConfigError("synth n_features must be >= 1");
  if (latent_dim < 1) throw ConfigError("synth latent_dim must be >= 1");
  if (n_classes < 2) throw ConfigError("synth n_classes must be >= 2");
  if (noise_level < 0.0) throw ConfigError("synth noise_level must be >= 0");
  if (slow_phi <= -1.0 || slow_phi >= 1.0 || fast_phi <= -1.0 ||
      fast_phi >= 1.0) {
    throw ConfigError("synth AR coefficients must lie in (-1,1)");
  }
  if (label_window < 1) throw ConfigError("synth label_window must be >= 1");
  if (label_rule != "trailing" && label_rule != "shuffled") {
    throw ConfigError("synth label_rule must be 'trailing' or 'shuffled', got '" +
                      label_rule + "'");
  }
}

SynthDataset synth_generate(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const std::size_t W = cfg.label_window;
  const std::size_t L = cfg.latent_dim;
  const std::size_t D = cfg.n_features;

  // Fixed random linear map latent -> features, plus per-feature offsets.
  Eigen::MatrixXd map(static_cast<Eigen::Index>(D),
                      static_cast<Eigen::Index>(L));
  for (Eigen::Index r = 0; r < map.rows(); ++r) {
    for (Eigen::Index c = 0; c < map.cols(); ++c) {
      map(r, c) = gauss(rng) / std::sqrt(static_cast<double>(L));
    }
  }
  Eigen::VectorXd offset(static_cast<Eigen::Index>(D));
  for (Eigen::Index r = 0; r < offset.size(); ++r) offset[r] = gauss(rng);

  // Distribute windows across runs; each run needs t_len - 1 extra rows.
  std::vector<std::size_t> windows_per_run(cfg.runs,
                                           cfg.n_windows / cfg.runs);
  for (std::size_t r = 0; r < cfg.n_windows % cfg.runs; ++r) {
    ++windows_per_run[r];
  }

  std::size_t total_rows = 0;
  for (std::size_t w : windows_per_run) {
    if (w > 0) total_rows += w + cfg.t_len - 1;
  }
  if (total_rows == 0) throw ConfigError("synth config yields no rows");

  SynthDataset out;
  out.rows.features.resize(static_cast<Eigen::Index>(total_rows),
                           static_cast<Eigen::Index>(D));
  out.rows.target.resize(total_rows);
  out.rows.run_ids.resize(total_rows);
  out.rows.feature_names.reserve(D);
  for (std::size_t j = 0; j < D; ++j) {
    std::string name = "f";
    if (j < 10) name += '0';
    name += std::to_string(j);
    out.rows.feature_names.push_back(name);
  }

  std::vector<double> regime(total_rows);  // slow latent, for the oracle MI
  const double slow_sigma = std::sqrt(1.0 - cfg.slow_phi * cfg.slow_phi);
  const double fast_sigma = std::sqrt(1.0 - cfg.fast_phi * cfg.fast_phi);

  std::size_t row = 0;
  for (std::size_t r = 0; r < cfg.runs; ++r) {
    if (windows_per_run[r] == 0) continue;
    const std::size_t run_rows = windows_per_run[r] + cfg.t_len - 1;

    // Start each latent component at its stationary distribution and run a
    // warmup of W steps so every emitted row has a full trailing history.
    Eigen::VectorXd s(static_cast<Eigen::Index>(L));
    for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = gauss(rng);
    std::vector<double> history;  // regime values incl. warmup
    history.reserve(run_rows + W);

    for (std::size_t step = 0; step < run_rows + W; ++step) {
      if (step > 0) {
        s[0] = cfg.slow_phi * s[0] + slow_sigma * gauss(rng);
        for (Eigen::Index i = 1; i < s.size(); ++i) {
          s[i] = cfg.fast_phi * s[i] + fast_sigma * gauss(rng);
        }
      }
      history.push_back(s[0]);
      if (step < W) continue;  // warmup rows are not emitted

      Eigen::VectorXd x = map * s + offset;
      for (Eigen::Index j = 0; j < x.size(); ++j) {
        x[j] += cfg.noise_level * gauss(rng);
      }
      out.rows.features.row(static_cast<Eigen::Index>(row)) = x.transpose();

      double trailing = 0.0;
      for (std::size_t b = history.size() - W; b < history.size(); ++b) {
        trailing += history[b];
      }
      out.rows.target[row] = trailing / static_cast<double>(W);
      out.rows.run_ids[row] = static_cast<int>(r);
      regime[row] = s[0];
      ++row;
    }
  }

  if (cfg.label_rule == "shuffled") {
    std::shuffle(out.rows.target.begin(), out.rows.target.end(), rng);
  }

  // Generation-time oracle: exact plug-in MI between the 30-bin quantized
  // regime and the K-quantile label of the target value.
  const Eigen::Map<const Eigen::VectorXd> regime_vec(
      regime.data(), static_cast<Eigen::Index>(regime.size()));
  const std::vector<int> regime_bins = mi::quantize_column(
      regime_vec, 30, regime_vec.minCoeff(), regime_vec.maxCoeff());
  const std::vector<int> labels =
      quantize_throughput(out.rows.target, cfg.n_classes);
  out.oracle_mi_bits = mi::plugin_discrete_mi(regime_bins, labels).bits;

  out.sidecar["config"] = synth_config_to_json(cfg);
  out.sidecar["n_rows"] = total_rows;
  out.sidecar["oracle_plugin_mi_bits"] = out.oracle_mi_bits;
  return out;
}

void write_synth(const SynthDataset& dataset,
                 const std::filesystem::path& csv_path,
                 const std::filesystem::path& sidecar_path) {
  std::vector<std::string> header;
  header.push_back(dataset.run_name);
  for (const auto& name : dataset.rows.feature_names) header.push_back(name);
  header.push_back(dataset.target_name);

  CsvWriter writer(csv_path, header);
  const auto n = static_cast<std::size_t>(dataset.rows.features.rows());
  std::vector<std::string> cells(header.size());
  for (std::size_t i = 0; i < n; ++i) {
    cells[0] = std::to_string(dataset.rows.run_ids[i]);
    for (Eigen::Index j = 0; j < dataset.rows.features.cols(); ++j) {
      cells[1 + static_cast<std::size_t>(j)] =
          format_double(dataset.rows.features(static_cast<Eigen::Index>(i), j));
    }
    cells.back() = format_double(dataset.rows.target[i]);
    writer.write_row(cells);
  }
  writer.close();

  std::ofstream side(sidecar_path);
  if (!side) {
    throw IoError("cannot open sidecar for writing: " + sidecar_path.string());
  }
  side << dataset.sidecar.dump(2) << '\n';
  if (!side) {
    throw IoError("failed writing sidecar: " + sidecar_path.string());
  }
}

DatasetSchema synth_schema(const SynthConfig& cfg) {
  DatasetSchema schema;
  for (std::size_t j = 0; j < cfg.n_features; ++j) {
    std::string name = "f";
    if (j < 10) name += '0';
    name += std::to_string(j);
    schema.feature_columns.push_back(name);
  }
  schema.target_column = "throughput";
  schema.run_column = "run_id";
  schema.t_len = cfg.t_len;
  schema.n_classes = cfg.n_classes;
  return schema;
}

nlohmann::json synth_config_to_json(const SynthConfig& cfg) {
  nlohmann::json j;
  j["seed"] = cfg.seed;
  j["n_windows"] = cfg.n_windows;
  j["runs"] = cfg.runs;
  j["t_len"] = cfg.t_len;
  j["n_features"] = cfg.n_features;
  j["latent_dim"] = cfg.latent_dim;
  j["n_classes"] = cfg.n_classes;
  j["noise_level"] = cfg.noise_level;
  j["slow_phi"] = cfg.slow_phi;
  j["fast_phi"] = cfg.fast_phi;
  j["label_window"] = cfg.label_window;
  j["label_rule"] = cfg.label_rule;
  return j;
}

SynthConfig synth_config_from_json(const nlohmann::json& j) {
  SynthConfig cfg;
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("n_windows")) cfg.n_windows = j.at("n_windows").get<std::size_t>();
  if (j.contains("runs")) cfg.runs = j.at("runs").get<std::size_t>();
  if (j.contains("t_len")) cfg.t_len = j.at("t_len").get<std::size_t>();
  if (j.contains("n_features")) {
    cfg.n_features = j.at("n_features").get<std::size_t>();
  }
  if (j.contains("latent_dim")) {
    cfg.latent_dim = j.at("latent_dim").get<std::size_t>();
  }
  if (j.contains("n_classes")) {
    cfg.n_classes = j.at("n_classes").get<std::size_t>();
  }
  if (j.contains("noise_level")) {
    cfg.noise_level = j.at("noise_level").get<double>();
  }
  if (j.contains("slow_phi")) cfg.slow_phi = j.at("slow_phi").get<double>();
  if (j.contains("fast_phi")) cfg.fast_phi = j.at("fast_phi").get<double>();
  if (j.contains("label_window")) {
    cfg.label_window = j.at("label_window").get<std::size_t>();
  }
  if (j.contains("label_rule")) {
    cfg.label_rule = j.at("label_rule").get<std::string>();
  }
  cfg.validate();
  return cfg;
}

}  // namespace ibsplit::data
