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

#ifndef IBSPLIT_TOOLS_COMMANDS_HPP_
#define IBSPLIT_TOOLS_COMMANDS_HPP_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "config_util.hpp"

namespace ibsplit::cli {

struct TrainFlags {
  std::string data;
};

struct AnalyzeFlags {
  std::string records;
};

struct SimulateFlags {
  std::string checkpoint;
  std::string data;
  std::string mode;  // adaptive | informative | compressed
};

struct EstimateFlags {
  std::string input;
  std::vector<std::string> estimators;
};

// Each command returns the process exit code: 0 success, 1 contract or
// verification failure. Usage/config problems throw ConfigError, which the
// caller maps to exit code 2.
int cmd_synth(const GlobalArgs& global, const nlohmann::json& config);
int cmd_train(const GlobalArgs& global, const nlohmann::json& config,
              const TrainFlags& flags);
int cmd_analyze(const GlobalArgs& global, const nlohmann::json& config,
                const AnalyzeFlags& flags);
int cmd_simulate(const GlobalArgs& global, const nlohmann::json& config,
                 const SimulateFlags& flags);
int cmd_estimate(const GlobalArgs& global, const nlohmann::json& config,
                 const EstimateFlags& flags);

}  // namespace ibsplit::cli

#endif  // IBSPLIT_TOOLS_COMMANDS_HPP_
