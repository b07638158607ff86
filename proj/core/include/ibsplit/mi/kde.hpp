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

#ifndef IBSPLIT_MI_KDE_HPP_
#define IBSPLIT_MI_KDE_HPP_

#include <vector>

#include "ibsplit/mi/estimate.hpp"

namespace ibsplit::mi {

struct KdeConfig {
  // Gaussian kernel variance sigma^2. Zero selects the default rule:
  // 0.1 * mean per-dimension sample variance of t (floored at 1e-12).
  double bandwidth = 0.0;
};

/// Pairwise-distance upper bound on the entropy of an equal-weight Gaussian
/// mixture centered on the rows of `t` with covariance sigma2*I, in nats:
///   H <= d/2 + (d/2) ln(2 pi sigma2)
///        + mean_i [ ln n - logsumexp_j( -||t_i - t_j||^2 / (2 sigma2) ) ].
double kde_entropy_upper_nats(const SampleMatrix& t, double sigma2);

/// MI between a discrete label and continuous activations via the kernel
/// mixture bound: I(Y;T) = H(T) - sum_y p(y) H(T|y), in bits. Labels with
/// fewer than 2 samples are excluded and flagged ("class_excluded").
MIEstimate kde_mi_label(const std::vector<int>& y, const SampleMatrix& t,
                        const KdeConfig& cfg = {});

}  // namespace ibsplit::mi

#endif  // IBSPLIT_MI_KDE_HPP_
