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

#include "ibsplit/mi/estimate.hpp"

#include <algorithm>
#include <cmath>

#include "ibsplit/common/error.hpp"

namespace ibsplit::mi {

void validate_samples(const SampleMatrix& x, const std::string& what) {
  if (x.rows() < 2) {
    throw DataError(what + " needs at least 2 samples, got " +
                    std::to_string(x.rows()));
  }
  if (x.cols() < 1) {
    throw DataError(what + " has no columns");
  }
  if (!x.allFinite()) {
    throw DataError(what + " contains non-finite values");
  }
}

std::string estimator_kind_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kBinning:
      return "binning";
    case EstimatorKind::kPlugin:
      return "plugin";
    case EstimatorKind::kKde:
      return "kde";
    case EstimatorKind::kGcmi:
      return "gcmi";
    case EstimatorKind::kConditionalGcmi:
      return "conditional_gcmi";
  }
  return "unknown";
}

bool MIEstimate::has_flag(const std::string& flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

nlohmann::json MIEstimate::to_json() const {
  nlohmann::json j;
  j["bits"] = bits;
  j["estimator"] = estimator_kind_name(estimator);
  j["config"] = config;
  j["flags"] = flags;
  return j;
}

double ib_lagrangian(double i_xh_bits, double i_yh_bits, double beta) {
  if (!std::isfinite(i_xh_bits) || !std::isfinite(i_yh_bits) ||
      !std::isfinite(beta)) {
    throw NumericError("ib_lagrangian requires finite inputs");
  }
  if (beta < 0.0) {
    throw ConfigError("ib_lagrangian beta must be >= 0, got " +
                      std::to_string(beta));
  }
  return i_xh_bits - beta * i_yh_bits;
}

}  // namespace ibsplit::mi
