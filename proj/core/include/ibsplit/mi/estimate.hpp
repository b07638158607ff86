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

#ifndef IBSPLIT_MI_ESTIMATE_HPP_
#define IBSPLIT_MI_ESTIMATE_HPP_

#include <Eigen/Core>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ibsplit::mi {

/// Realizations of a (possibly multivariate) variable, one sample per row.
using SampleMatrix = Eigen::MatrixXd;

/// Throws DataError unless `x` has >= 2 rows, >= 1 column and only finite
/// entries. `what` names the argument in the message.
void validate_samples(const SampleMatrix& x, const std::string& what);

enum class EstimatorKind { kBinning, kPlugin, kKde, kGcmi, kConditionalGcmi };

std::string estimator_kind_name(EstimatorKind kind);

/// A mutual-information estimate in bits together with the estimator identity
/// and an echo of the configuration that produced it (bin counts, bandwidth,
/// conditioning set, numerical flags such as "ridge_regularized").
struct MIEstimate {
  double bits = 0.0;
  EstimatorKind estimator = EstimatorKind::kPlugin;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::string> flags;

  bool has_flag(const std::string& flag) const;

  /// Nonnegative view for plotting. Bias-corrected estimates may go slightly
  /// negative near independence; `bits` keeps the honest value.
  double clamped_bits() const { return bits < 0.0 ? 0.0 : bits; }

  nlohmann::json to_json() const;
};

/// Information-bottleneck Lagrangian I(X;H) - beta * I(H;Y), a diagnostic
/// combination of two estimates (never optimized directly here).
double ib_lagrangian(double i_xh_bits, double i_yh_bits, double beta);

}  // namespace ibsplit::mi

#endif  // IBSPLIT_MI_ESTIMATE_HPP_
