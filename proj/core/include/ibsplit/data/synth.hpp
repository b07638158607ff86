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

#ifndef IBSPLIT_DATA_SYNTH_HPP_
#define IBSPLIT_DATA_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "ibsplit/data/dataset.hpp"

namespace ibsplit::data {

/// Synthetic sequence generator with controllable information structure.
///
/// Latent state: component 0 is a slow AR(1) "regime" (slow_phi), the rest
/// are faster AR(1) distractors (fast_phi). Features are a fixed random
/// linear map of the latent plus offsets and isotropic noise. The target
/// value at row t is the mean of the regime over the trailing label_window
/// steps; labels are its K-quantile bins (fitted during ingestion). Because
/// the regime moves slowly, labels are informative yet near-constant within
/// a window, so a readout of the latent achieves high accuracy while
/// temporal integration of the noisy features is still required.
struct SynthConfig {
  std::uint64_t seed = 7;
  std::size_t n_windows = 5000;
  std::size_t runs = 50;
  std::size_t t_len = 20;
  std::size_t n_features = 11;
  std::size_t latent_dim = 3;
  std::size_t n_classes = 8;
  double noise_level = 0.3;
  double slow_phi = 0.999;
  double fast_phi = 0.9;
  std::size_t label_window = 20;
  std::string label_rule = "trailing";  // "trailing" | "shuffled"

  void validate() const;
};

/// Generated rows plus the generation-time oracle: the exact plug-in MI (in
/// bits) between the 30-bin quantized regime and the K-quantile label, both
/// computed over all generated rows.
struct SynthDataset {
  RowBlock rows;
  std::string target_name = "throughput";
  std::string run_name = "run_id";
  double oracle_mi_bits = 0.0;
  nlohmann::json sidecar;
};

SynthDataset synth_generate(const SynthConfig& cfg);

/// Writes the dataset as CSV (run_id, features..., target) plus a JSON
/// sidecar (config echo + oracle MI). Byte-identical for identical configs.
void write_synth(const SynthDataset& dataset,
                 const std::filesystem::path& csv_path,
                 const std::filesystem::path& sidecar_path);

/// Schema matching write_synth's column layout (statistics left unfitted).
DatasetSchema synth_schema(const SynthConfig& cfg);

nlohmann::json synth_config_to_json(const SynthConfig& cfg);
SynthConfig synth_config_from_json(const nlohmann::json& j);

}  // namespace ibsplit::data

#endif  // IBSPLIT_DATA_SYNTH_HPP_
