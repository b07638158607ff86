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

#ifndef IBSPLIT_SIM_SIMULATOR_HPP_
#define IBSPLIT_SIM_SIMULATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ibsplit/cascade/cascade.hpp"
#include "ibsplit/data/dataset.hpp"
#include "ibsplit/sim/link.hpp"

namespace ibsplit::sim {

/// Orchestrator behaviour: transmit the Compressed code exactly when the
/// link is congested AND the Compressed mode's recent accuracy clears the
/// application floor; otherwise transmit the Informative code. Mode switches
/// are blocked inside the hysteresis window. Accuracy feedback arrives in
/// periodic batches over a sliding window of recent steps.
struct OrchestratorPolicy {
  double accuracy_floor = 0.5;
  std::size_t hysteresis_steps = 10;  // >= 1
  std::size_t feedback_period = 10;   // steps between feedback updates, >= 1
  std::size_t feedback_window = 50;   // sliding window length, >= 1

  void validate() const;
  nlohmann::json to_json() const;
  static OrchestratorPolicy from_json(const nlohmann::json& j);
};

/// Pure decision rule. `recent_accuracy_compressed` is the orchestrator's
/// current (possibly stale) estimate; modes never observed in the window
/// report an optimistic 1.0 so they stay eligible for exploration.
cascade::Mode policy_decide(const OrchestratorPolicy& policy, LinkState state,
                            double recent_accuracy_compressed,
                            std::size_t steps_since_switch,
                            cascade::Mode current);

enum class ModeRule { kAdaptive, kForcedInformative, kForcedCompressed };

ModeRule mode_rule_from_name(const std::string& name);
std::string mode_rule_name(ModeRule rule);

struct SimConfig {
  LinkModel link;
  OrchestratorPolicy policy;
  std::size_t steps = 1000;
  ModeRule mode_rule = ModeRule::kAdaptive;

  void validate() const;
  nlohmann::json to_json() const;
  static SimConfig from_json(const nlohmann::json& j);
};

struct SimStep {
  std::size_t step = 0;
  std::size_t window = 0;  // index into the stream
  LinkState link_state = LinkState::kNormal;
  cascade::Mode mode = cascade::Mode::kInformative;
  bool switched = false;
  std::size_t payload_bytes = 0;
  double latency = 0.0;  // steps: payload/bandwidth + base latency
  std::size_t correct_timesteps = 0;
  std::size_t total_timesteps = 0;
  double accuracy = 0.0;  // correct_timesteps / total_timesteps
};

/// Aggregates are integer/rational reductions over the rows, so recomputing
/// them from the rows reproduces them bit-exactly.
struct SimAggregates {
  std::size_t total_bytes = 0;
  double mean_latency = 0.0;
  std::size_t steps_informative = 0;
  std::size_t steps_compressed = 0;
  std::size_t correct_informative = 0;
  std::size_t timesteps_informative = 0;
  std::size_t correct_compressed = 0;
  std::size_t timesteps_compressed = 0;
  double accuracy = 0.0;              // all timesteps pooled
  double accuracy_informative = 0.0;  // 0 when the mode never ran
  double accuracy_compressed = 0.0;
  std::size_t switch_count = 0;
};

bool operator==(const SimAggregates& a, const SimAggregates& b);

SimAggregates compute_aggregates(const std::vector<SimStep>& steps);

struct SimTrace {
  std::uint64_t seed = 0;
  ModeRule mode_rule = ModeRule::kAdaptive;
  std::vector<SimStep> steps;
  SimAggregates aggregates;

  nlohmann::json summary_json() const;  // aggregates + echoed seed
};

/// Runs the split-inference loop: encode on the UE, pick a mode, serialize
/// over the wire, decode on the edge, score against the labels. The stream
/// is consumed cyclically when steps exceed its length. Deterministic:
/// identical model/stream/config give byte-identical traces.
SimTrace run(const cascade::CascadeModel& model, const data::Dataset& stream,
             const SimConfig& cfg);

void write_trace_csv(const SimTrace& trace, const std::filesystem::path& path);

}  // namespace ibsplit::sim

#endif  // IBSPLIT_SIM_SIMULATOR_HPP_
