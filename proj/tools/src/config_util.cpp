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

#include "config_util.hpp"

#include <fstream>

#include "ibsplit/common/error.hpp"

namespace ibsplit::cli {

nlohmann::json load_config_file(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse config file " + path + ": " + e.what());
  }
  if (!j.is_object()) {
    throw ConfigError("config file " + path + " must hold a JSON object");
  }
  return j;
}

nlohmann::json config_section(const nlohmann::json& config,
                              const std::string& name) {
  if (config.contains(name) && config.at(name).is_object()) {
    return config.at(name);
  }
  return nlohmann::json::object();
}

std::uint64_t resolve_seed(const GlobalArgs& global,
                           const nlohmann::json& config,
                           const nlohmann::json& section) {
  if (global.seed_set) return global.seed;
  if (section.contains("seed")) {
    return section.at("seed").get<std::uint64_t>();
  }
  if (config.contains("seed")) {
    return config.at("seed").get<std::uint64_t>();
  }
  return global.seed;
}

std::filesystem::path resolve_path(const std::string& flag_value,
                                   const nlohmann::json& section,
                                   const std::string& key, bool required,
                                   const std::string& flag_name) {
  if (!flag_value.empty()) return flag_value;
  if (section.contains(key) && section.at(key).is_string()) {
    return section.at(key).get<std::string>();
  }
  if (required) {
    throw ConfigError("missing required path: pass " + flag_name +
                      " or set config key '" + key + "'");
  }
  return {};
}

std::filesystem::path require_out_dir(const GlobalArgs& global) {
  if (global.out_dir.empty()) {
    throw ConfigError("this command writes artifacts; pass --out DIR");
  }
  std::filesystem::path dir(global.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output directory " + dir.string() + ": " +
                  ec.message());
  }
  return dir;
}

namespace {

// File paths vary across environments and runs; keeping them out of the
// effective config keeps identical runs byte-identical.
const char* kPathKeys[] = {"data", "records", "checkpoint", "input", "out"};

}  // namespace

void write_effective_config(const std::filesystem::path& out_dir,
                            const std::string& command, std::uint64_t seed,
                            nlohmann::json section) {
  for (const char* key : kPathKeys) section.erase(key);
  nlohmann::json effective;
  effective["command"] = command;
  effective["seed"] = seed;
  effective[command] = std::move(section);
  write_json_file(effective, out_dir / "effective_config.json");
}

void write_json_file(const nlohmann::json& j,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace ibsplit::cli
