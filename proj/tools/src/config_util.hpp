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

#ifndef IBSPLIT_TOOLS_CONFIG_UTIL_HPP_
#define IBSPLIT_TOOLS_CONFIG_UTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace ibsplit::cli {

/// Global flags shared by every subcommand. Flags override config-file
/// values; the resolved ("effective") configuration is always written into
/// the output directory, with file paths excluded so identical runs in
/// different directories stay byte-identical.
struct GlobalArgs {
  std::string config_path;
  std::uint64_t seed = 7;
  bool seed_set = false;  // true when --seed was passed
  std::string out_dir;
};

/// Parses the --config JSON file; empty path yields an empty object.
nlohmann::json load_config_file(const std::string& path);

/// Returns config[name] when it is an object, else an empty object.
nlohmann::json config_section(const nlohmann::json& config,
                              const std::string& name);

/// Seed precedence: --seed flag, then section["seed"], then top-level
/// config["seed"], then the built-in default.
std::uint64_t resolve_seed(const GlobalArgs& global,
                           const nlohmann::json& config,
                           const nlohmann::json& section);

/// Resolves a path-valued setting: flag value when nonempty, else
/// section[key], else empty. `required` turns an empty result into a
/// ConfigError naming the flag.
std::filesystem::path resolve_path(const std::string& flag_value,
                                   const nlohmann::json& section,
                                   const std::string& key, bool required,
                                   const std::string& flag_name);

/// Creates the output directory (recursively) and returns it; throws
/// ConfigError when --out was not given.
std::filesystem::path require_out_dir(const GlobalArgs& global);

/// Writes {"command": ..., "seed": ..., <command>: section} to
/// out/effective_config.json with path-valued keys removed.
void write_effective_config(const std::filesystem::path& out_dir,
                            const std::string& command, std::uint64_t seed,
                            nlohmann::json section);

/// Serializes `j` to `path` with a trailing newline (deterministic bytes).
void write_json_file(const nlohmann::json& j,
                     const std::filesystem::path& path);

}  // namespace ibsplit::cli

#endif  // IBSPLIT_TOOLS_CONFIG_UTIL_HPP_
