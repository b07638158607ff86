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

#ifndef IBSPLIT_SIM_LINK_HPP_
#define IBSPLIT_SIM_LINK_HPP_

#include <cstdint>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

namespace ibsplit::sim {

enum class LinkState { kNormal, kCongested };

LinkState link_state_from_name(const std::string& name);
std::string link_state_name(LinkState state);

/// Two-state Markov-modulated bandwidth process. Bandwidths are bytes per
/// simulated step; latency of a message is payload_bytes / bandwidth plus the
/// base latency, measured in steps.
struct LinkModel {
  double p_nc = 0.05;            // P(normal -> congested)
  double p_cn = 0.05;            // P(congested -> normal)
  double bytes_normal = 2000.0;  // B_n, bytes per step
  double bytes_congested = 250.0;  // B_c, bytes per step; B_c < B_n
  double base_latency = 0.05;    // steps added to every message
  std::uint64_t seed = 1;
  LinkState initial = LinkState::kNormal;

  double bandwidth(LinkState state) const {
    return state == LinkState::kNormal ? bytes_normal : bytes_congested;
  }

  void validate() const;
  nlohmann::json to_json() const;
  static LinkModel from_json(const nlohmann::json& j);
};

/// One Markov transition. Draws a single uniform variate from `rng`
/// (portable construction, not std::uniform_real_distribution, so traces are
/// identical across standard library implementations).
LinkState link_step(const LinkModel& link, LinkState current,
                    std::mt19937_64& rng);

}  // namespace ibsplit::sim

#endif  // IBSPLIT_SIM_LINK_HPP_
