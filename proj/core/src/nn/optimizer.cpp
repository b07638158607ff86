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

#include "ibsplit/nn/optimizer.hpp"

#include <cmath>

#include "ibsplit/common/error.hpp"

namespace ibsplit::nn {

OptimizerKind optimizer_kind_from_name(const std::string& name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  throw ConfigError("unknown optimizer kind '" + name +
                    "' (expected sgd or adam)");
}

std::string optimizer_kind_name(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

void Optimizer::step(const std::vector<Parameter*>& params) {
  if (config_.kind == OptimizerKind::kAdam && moment1_.empty()) {
    moment1_.resize(params.size());
    moment2_.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto size = static_cast<Eigen::Index>(params[i]->value.size());
      moment1_[i] = Eigen::VectorXd::Zero(size);
      moment2_[i] = Eigen::VectorXd::Zero(size);
    }
  }
  if (config_.kind == OptimizerKind::kAdam && moment1_.size() != params.size()) {
    throw ConfigError("optimizer step called with " +
                      std::to_string(params.size()) +
                      " parameters but state holds " +
                      std::to_string(moment1_.size()));
  }
  ++step_count_;

  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    if (p.frozen) continue;
    auto value = p.value.vector();
    auto grad = p.grad.vector();
    switch (config_.kind) {
      case OptimizerKind::kSgd:
        value -= config_.lr * grad;
        break;
      case OptimizerKind::kAdam: {
        Eigen::VectorXd& m = moment1_[i];
        Eigen::VectorXd& v = moment2_[i];
        m = config_.beta1 * m + (1.0 - config_.beta1) * grad;
        v = (config_.beta2 * v.array() +
             (1.0 - config_.beta2) * grad.array().square())
                .matrix();
        const auto t = static_cast<double>(step_count_);
        const double bias1 = 1.0 - std::pow(config_.beta1, t);
        const double bias2 = 1.0 - std::pow(config_.beta2, t);
        value.array() -= config_.lr * (m.array() / bias1) /
                         ((v.array() / bias2).sqrt() + config_.eps);
        break;
      }
    }
  }
}

void optimizer_step(const std::vector<Parameter*>& params,
                    const OptimizerConfig& config) {
  Optimizer opt(config);
  opt.step(params);
}

}  // namespace ibsplit::nn
