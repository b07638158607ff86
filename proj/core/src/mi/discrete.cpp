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

#include "ibsplit/mi/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "ibsplit/common/error.hpp"

namespace ibsplit::mi {

namespace {

constexpr double kLog2 = 0.6931471805599453;

std::map<int, std::size_t> count_symbols(const std::vector<int>& symbols) {
  std::map<int, std::size_t> counts;
  for (int s : symbols) ++counts[s];
  return counts;
}

}  // namespace

double entropy_bits(const std::vector<int>& symbols) {
  if (symbols.empty()) throw DataError("entropy of an empty symbol stream");
  const auto n = static_cast<double>(symbols.size());
  double h = 0.0;
  for (const auto& [sym, count] : count_symbols(symbols)) {
    (void)sym;
    const double p = static_cast<double>(count) / n;
    h -= p * std::log(p);
  }
  return h / kLog2;
}

MIEstimate plugin_discrete_mi(const std::vector<int>& x,
                              const std::vector<int>& y) {
  if (x.size() != y.size()) {
    throw DataError("plugin_discrete_mi sample counts differ: " +
                    std::to_string(x.size()) + " vs " +
                    std::to_string(y.size()));
  }
  if (x.size() < 2) {
    throw DataError("plugin_discrete_mi needs at least 2 samples");
  }
  const auto n = static_cast<double>(x.size());

  const auto cx = count_symbols(x);
  const auto cy = count_symbols(y);
  std::map<std::pair<int, int>, std::size_t> cxy;
  for (std::size_t i = 0; i < x.size(); ++i) ++cxy[{x[i], y[i]}];

  // I = sum p(x,y) log p(x,y)/(p(x)p(y)), accumulated over the joint support
  // in canonical (sorted) order for reproducible rounding.
  double nats = 0.0;
  for (const auto& [key, count] : cxy) {
    const double pxy = static_cast<double>(count) / n;
    const double px = static_cast<double>(cx.at(key.first)) / n;
    const double py = static_cast<double>(cy.at(key.second)) / n;
    nats += pxy * std::log(pxy / (px * py));
  }

  MIEstimate est;
  est.estimator = EstimatorKind::kPlugin;
  const double upper = std::min(entropy_bits(x), entropy_bits(y));
  est.bits = std::clamp(nats / kLog2, 0.0, upper);
  est.config["n_samples"] = x.size();
  return est;
}

std::vector<int> quantize_column(const Eigen::VectorXd& column,
                                 std::size_t bins, double lo, double hi) {
  if (bins < 2) {
    throw ConfigError("bins_per_dim must be >= 2, got " +
                      std::to_string(bins));
  }
  std::vector<int> out(static_cast<std::size_t>(column.size()), 0);
  if (hi <= lo) return out;  // degenerate column: one bin
  const double width = (hi - lo) / static_cast<double>(bins);
  for (Eigen::Index i = 0; i < column.size(); ++i) {
    auto b = static_cast<long>(std::floor((column[i] - lo) / width));
    b = std::clamp(b, 0L, static_cast<long>(bins) - 1L);
    out[static_cast<std::size_t>(i)] = static_cast<int>(b);
  }
  return out;
}

std::vector<int> quantize_rows(const SampleMatrix& x,
                               const BinningConfig& cfg) {
  validate_samples(x, "binning input");
  const auto n = static_cast<std::size_t>(x.rows());
  const auto d = static_cast<std::size_t>(x.cols());

  std::vector<std::vector<int>> per_dim(d);
  for (std::size_t j = 0; j < d; ++j) {
    const Eigen::VectorXd col = x.col(static_cast<Eigen::Index>(j));
    const double lo = cfg.fixed_range() ? cfg.fixed_min : col.minCoeff();
    const double hi = cfg.fixed_range() ? cfg.fixed_max : col.maxCoeff();
    per_dim[j] = quantize_column(col, cfg.bins_per_dim, lo, hi);
  }

  // Dense tuple ids: map each distinct bin tuple to a small integer. A map
  // keyed by the tuple avoids overflow for wide matrices.
  std::map<std::vector<int>, int> ids;
  std::vector<int> symbols(n);
  std::vector<int> tuple(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) tuple[j] = per_dim[j][i];
    symbols[i] =
        ids.emplace(tuple, static_cast<int>(ids.size())).first->second;
  }
  return symbols;
}

MIEstimate binning_mi(const SampleMatrix& x, const SampleMatrix& y,
                      const BinningConfig& cfg) {
  if (x.rows() != y.rows()) {
    throw DataError("binning_mi sample counts differ: " +
                    std::to_string(x.rows()) + " vs " +
                    std::to_string(y.rows()));
  }
  MIEstimate est = plugin_discrete_mi(quantize_rows(x, cfg),
                                      quantize_rows(y, cfg));
  est.estimator = EstimatorKind::kBinning;
  est.config["bins_per_dim"] = cfg.bins_per_dim;
  est.config["range_rule"] = cfg.fixed_range() ? "fixed" : "min-max";
  return est;
}

}  // namespace ibsplit::mi
