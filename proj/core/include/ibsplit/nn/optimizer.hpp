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

#ifndef IBSPLIT_NN_OPTIMIZER_HPP_
#define IBSPLIT_NN_OPTIMIZER_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "ibsplit/nn/tensor.hpp"

namespace ibsplit::nn {

enum class OptimizerKind { kSgd, kAdam };

OptimizerKind optimizer_kind_from_name(const std::string& name);
std::string optimizer_kind_name(OptimizerKind kind);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Applies one update step to every non-frozen parameter in `params` using the
// gradients currently stored on them. Frozen parameters are never read or
// written (their bytes are bit-identical before and after any step).
//
// Adam keeps per-slot first/second moment state keyed by position in
// `params`; call step() with the same parameter list (same order, same
// shapes) for the lifetime of one Optimizer instance.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config) : config_(config) {}

  void step(const std::vector<Parameter*>& params);

  const OptimizerConfig& config() const { return config_; }
  std::size_t step_count() const { return step_count_; }

 private:
  OptimizerConfig config_;
  std::size_t step_count_ = 0;
  std::vector<Eigen::VectorXd> moment1_;
  std::vector<Eigen::VectorXd> moment2_;
};

// One-shot convenience matching the functional interface: builds a throwaway
// Optimizer and applies a single step. For Adam this is the bias-corrected
// first step; training loops should hold an Optimizer instance instead.
void optimizer_step(const std::vector<Parameter*>& params,
                    const OptimizerConfig& config);

}  // namespace ibsplit::nn

#endif  // IBSPLIT_NN_OPTIMIZER_HPP_
