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

#include "ibsplit/nn/checkpoint.hpp"

#include <fstream>

#include "ibsplit/common/error.hpp"

namespace ibsplit::nn {

nlohmann::json parameter_to_json(const Parameter& p) {
  nlohmann::json j;
  j["shape"] = p.value.shape();
  j["values"] = p.value.values();
  j["frozen"] = p.frozen;
  return j;
}

Parameter parameter_from_json(const nlohmann::json& j) {
  Parameter p(j.at("shape").get<std::vector<std::size_t>>());
  auto values = j.at("values").get<std::vector<double>>();
  if (values.size() != p.value.size()) {
    throw IoError("checkpoint parameter holds " +
                  std::to_string(values.size()) + " values for shape " +
                  shape_string(p.value.shape()));
  }
  p.value.values().assign(values.begin(), values.end());
  p.frozen = j.at("frozen").get<bool>();
  return p;
}

nlohmann::json dense_to_json(const DenseLayer& layer) {
  nlohmann::json j;
  j["type"] = "dense";
  j["activation"] = activation_name(layer.activation);
  j["weights"] = parameter_to_json(layer.weights);
  j["bias"] = parameter_to_json(layer.bias);
  return j;
}

DenseLayer dense_from_json(const nlohmann::json& j) {
  if (j.at("type").get<std::string>() != "dense") {
    throw IoError("expected a dense layer, got type '" +
                  j.at("type").get<std::string>() + "'");
  }
  Parameter weights = parameter_from_json(j.at("weights"));
  DenseLayer layer(weights.value.cols(), weights.value.rows(),
                   activation_from_name(j.at("activation").get<std::string>()));
  layer.weights = std::move(weights);
  layer.bias = parameter_from_json(j.at("bias"));
  if (layer.bias.value.size() != layer.out_dim()) {
    throw IoError("dense bias size " +
                  std::to_string(layer.bias.value.size()) +
                  " does not match output dim " +
                  std::to_string(layer.out_dim()));
  }
  return layer;
}

nlohmann::json lstm_to_json(const LstmLayer& layer) {
  nlohmann::json j;
  j["type"] = "lstm";
  j["w_input"] = parameter_to_json(layer.w_input);
  j["w_recur"] = parameter_to_json(layer.w_recur);
  j["bias"] = parameter_to_json(layer.bias);
  return j;
}

LstmLayer lstm_from_json(const nlohmann::json& j) {
  if (j.at("type").get<std::string>() != "lstm") {
    throw IoError("expected an lstm layer, got type '" +
                  j.at("type").get<std::string>() + "'");
  }
  Parameter w_input = parameter_from_json(j.at("w_input"));
  Parameter w_recur = parameter_from_json(j.at("w_recur"));
  if (w_input.value.rows() != w_recur.value.rows() ||
      w_input.value.rows() % 4 != 0 ||
      w_recur.value.cols() * 4 != w_recur.value.rows()) {
    throw IoError("lstm checkpoint has inconsistent gate shapes " +
                  shape_string(w_input.value.shape()) + " / " +
                  shape_string(w_recur.value.shape()));
  }
  LstmLayer layer(w_input.value.cols(), w_recur.value.cols());
  layer.w_input = std::move(w_input);
  layer.w_recur = std::move(w_recur);
  layer.bias = parameter_from_json(j.at("bias"));
  if (layer.bias.value.size() != 4 * layer.cells()) {
    throw IoError("lstm bias size " + std::to_string(layer.bias.value.size()) +
                  " does not match 4*cells=" +
                  std::to_string(4 * layer.cells()));
  }
  return layer;
}

nlohmann::json model_to_json(const SeqModel& model) {
  nlohmann::json j;
  j["input_dim"] = model.input_dim;
  j["seq_len"] = model.seq_len;
  j["n_classes"] = model.n_classes;
  j["encoder"] = nlohmann::json::array();
  for (const auto& l : model.encoder) j["encoder"].push_back(lstm_to_json(l));
  j["head"] = nlohmann::json::array();
  for (const auto& l : model.head) j["head"].push_back(dense_to_json(l));
  return j;
}

SeqModel model_from_json(const nlohmann::json& j) {
  SeqModel m;
  m.input_dim = j.at("input_dim").get<std::size_t>();
  m.seq_len = j.at("seq_len").get<std::size_t>();
  m.n_classes = j.at("n_classes").get<std::size_t>();
  for (const auto& lj : j.at("encoder")) m.encoder.push_back(lstm_from_json(lj));
  for (const auto& lj : j.at("head")) m.head.push_back(dense_from_json(lj));
  if (m.encoder.empty() || m.head.empty()) {
    throw IoError("model checkpoint is missing encoder or head layers");
  }
  return m;
}

void save_checkpoint(const nlohmann::json& payload, const std::string& kind,
                     const std::filesystem::path& path) {
  nlohmann::json envelope;
  envelope["format_version"] = kCheckpointFormatVersion;
  envelope["kind"] = kind;
  envelope["model"] = payload;
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open checkpoint file for writing: " + path.string());
  }
  out << envelope.dump(2) << '\n';
  if (!out) {
    throw IoError("failed writing checkpoint file: " + path.string());
  }
}

nlohmann::json load_checkpoint(const std::filesystem::path& path,
                               const std::string& expected_kind) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open checkpoint file: " + path.string());
  }
  nlohmann::json envelope;
  try {
    in >> envelope;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("checkpoint file " + path.string() +
                  " is not valid JSON: " + e.what());
  }
  const int version = envelope.at("format_version").get<int>();
  if (version != kCheckpointFormatVersion) {
    throw IoError("checkpoint " + path.string() + " has format_version " +
                  std::to_string(version) + ", expected " +
                  std::to_string(kCheckpointFormatVersion));
  }
  if (!expected_kind.empty()) {
    const auto kind = envelope.at("kind").get<std::string>();
    if (kind != expected_kind) {
      throw IoError("checkpoint " + path.string() + " holds a '" + kind +
                    "' model, expected '" + expected_kind + "'");
    }
  }
  return envelope.at("model");
}

void save_model(const SeqModel& model, const std::filesystem::path& path) {
  save_checkpoint(model_to_json(model), "seq_model", path);
}

SeqModel load_model(const std::filesystem::path& path) {
  return model_from_json(load_checkpoint(path, "seq_model"));
}

}  // namespace ibsplit::nn
