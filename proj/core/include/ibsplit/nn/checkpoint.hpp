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

#ifndef IBSPLIT_NN_CHECKPOINT_HPP_
#define IBSPLIT_NN_CHECKPOINT_HPP_

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "ibsplit/nn/layers.hpp"
#include "ibsplit/nn/network.hpp"
#include "ibsplit/nn/tensor.hpp"

namespace ibsplit::nn {

inline constexpr int kCheckpointFormatVersion = 1;

nlohmann::json parameter_to_json(const Parameter& p);
Parameter parameter_from_json(const nlohmann::json& j);

nlohmann::json dense_to_json(const DenseLayer& layer);
DenseLayer dense_from_json(const nlohmann::json& j);

nlohmann::json lstm_to_json(const LstmLayer& layer);
LstmLayer lstm_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const SeqModel& model);
SeqModel model_from_json(const nlohmann::json& j);

// Wraps `payload` in a versioned envelope {format_version: 1, kind, model:
// payload} and writes it to `path` with sorted keys. Doubles survive the
// round trip exactly (shortest-representation printing).
void save_checkpoint(const nlohmann::json& payload, const std::string& kind,
                     const std::filesystem::path& path);

// Reads an envelope written by save_checkpoint, validating format_version
// and (when non-empty) the expected kind. Returns the payload.
nlohmann::json load_checkpoint(const std::filesystem::path& path,
                               const std::string& expected_kind = "");

void save_model(const SeqModel& model, const std::filesystem::path& path);
SeqModel load_model(const std::filesystem::path& path);

}  // namespace ibsplit::nn

#endif  // IBSPLIT_NN_CHECKPOINT_HPP_
