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

#include "ibsplit/sim/link.hpp"

#include <cmath>

#include "ibsplit/common/error.hpp"

namespace ibsplit::sim {

LinkState link_state_from_name(const std::string& name) {
  if (name == "normal") return LinkState::kNormal;
  if (name == "congested") return LinkState::kCongested;
  throw ConfigError("unknown link state '" + name +
                    "' (expected normal or congested)");
}

std::string link_state_name(LinkState state) {
  return state == LinkState::kNormal ? "normal" : "congested";
}

void LinkModel::validate() const {
  if (p_nc < 0.0 || p_nc > 1.0 || p_cn < 0.0 || p_cn > 1.0) {
    throw ConfigError("link transition probabilities must be in [0,1]");
  }
  if (!(bytes_congested < bytes_normal)) {
    throw ConfigError("congested bandwidth must be below normal bandwidth");
  }
  if (bytes_congested <= 0.0) {
    throw ConfigError("bandwidths must be positive");
  }
  if (base_latency < 0.0) {
    throw ConfigError("base latency must be >= 0");
  }
}

nlohmann::json LinkModel::to_json() const {
  nlohmann::json j;
  j["p_nc"] = p_nc;
  j["p_cn"] = p_cn;
  j["bytes_normal"] = bytes_normal;
  j["bytes_congested"] = bytes_congested;
  j["base_latency"] = base_latency;
  j["seed"] = seed;
  j["initial"] = link_state_name(initial);
  return j;
}

LinkModel LinkModel::from_json(const nlohmann::json& j) {
  LinkModel link;
  if (j.contains("p_nc")) link.p_nc = j.at("p_nc").get<double>();
  if (j.contains("p_cn")) link.p_cn = j.at("p_cn").get<double>();
  if (j.contains("bytes_normal")) {
    link.bytes_normal = j.at("bytes_normal").get<double>();
  }
  if (j.contains("bytes_congested")) {
    link.bytes_congested = j.at("bytes_congested").get<double>();
  }
  if (j.contains("base_latency")) {
    link.base_latency = j.at("base_latency").get<double>();
  }
  if (j.contains("seed")) link.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("initial")) {
    link.initial = link_state_from_name(j.at("initial").get<std::string>());
  }
  link.validate();
  return link;
}

LinkState link_step(const LinkModel& link, LinkState current,
                    std::mt19937_64& rng) {
  // 53-bit uniform in [0,1); bit-reproducible everywhere.
  const double u = std::ldexp(static_cast<double>(rng() >> 11), -53);
  if (current == LinkState::kNormal) {
    return u < link.p_nc ? LinkState::kCongested : LinkState::kNormal;
  }
  return u < link.p_cn ? LinkState::kNormal : LinkState::kCongested;
}

}  // namespace ibsplit::sim
