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

#ifndef IBSPLIT_MI_DISCRETE_HPP_
#define IBSPLIT_MI_DISCRETE_HPP_

#include <cstddef>
#include <vector>

#include "ibsplit/mi/estimate.hpp"

namespace ibsplit::mi {

struct BinningConfig {
  std::size_t bins_per_dim = 30;
  // Range rule: per-dimension min-max by default; set fixed_min/fixed_max to
  // identical values to keep min-max, or to a finite span for a fixed range.
  double fixed_min = 0.0;
  double fixed_max = 0.0;
  bool fixed_range() const { return fixed_max > fixed_min; }
};

/// Empirical plug-in entropy of a symbol stream, in bits.
double entropy_bits(const std::vector<int>& symbols);

/// Exact plug-in mutual information of the empirical joint distribution of
/// two discrete symbol streams, in bits. The result is clamped to the exact
/// invariant range [0, min(H(X), H(Y))].
MIEstimate plugin_discrete_mi(const std::vector<int>& x,
                              const std::vector<int>& y);

/// Quantizes one column into `bins` equal-width bins over [lo, hi] (values at
/// or beyond the edges clamp into the terminal bins). A degenerate column
/// (hi == lo) maps every sample to bin 0.
std::vector<int> quantize_column(const Eigen::VectorXd& column,
                                 std::size_t bins, double lo, double hi);

/// Quantizes every dimension with cfg.bins_per_dim bins, forms joint symbols
/// per row (dense tuple ids) and returns them. Exposed for tests.
std::vector<int> quantize_rows(const SampleMatrix& x,
                               const BinningConfig& cfg);

/// Binning MI estimator: quantize both matrices dimension-wise, then take the
/// exact plug-in MI of the joint symbols.
MIEstimate binning_mi(const SampleMatrix& x, const SampleMatrix& y,
                      const BinningConfig& cfg);

}  // namespace ibsplit::mi

#endif  // IBSPLIT_MI_DISCRETE_HPP_
