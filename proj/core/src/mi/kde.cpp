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

#include "ibsplit/mi/kde.hpp"

#include <cmath>
#include <map>

#include "ibsplit/common/error.hpp"

namespace ibsplit::mi {

namespace {

constexpr double kLog2 = 0.6931471805599453;

double default_bandwidth(const SampleMatrix& t) {
  const auto n = static_cast<double>(t.rows());
  const Eigen::RowVectorXd mean = t.colwise().mean();
  const double mean_var =
      (t.rowwise() - mean).array().square().sum() / ((n - 1.0) * t.cols());
  return std::max(0.1 * mean_var, 1e-12);
}

}  // namespace

double kde_entropy_upper_nats(const SampleMatrix& t, double sigma2) {
  validate_samples(t, "kde entropy input");
  if (sigma2 <= 0.0) {
    throw ConfigError("kde bandwidth must be > 0, got " +
                      std::to_string(sigma2));
  }
  const auto n = t.rows();
  const auto d = static_cast<double>(t.cols());

  // Pairwise squared distances via the Gram expansion.
  const Eigen::VectorXd sq = t.rowwise().squaredNorm();
  Eigen::MatrixXd dist2 = -2.0 * (t * t.transpose());
  dist2.colwise() += sq;
  dist2.rowwise() += sq.transpose();

  Eigen::MatrixXd logk = dist2 / (-2.0 * sigma2);
  double mean_lse = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = logk.row(i).maxCoeff();
    const double lse = m + std::log((logk.row(i).array() - m).exp().sum());
    mean_lse += lse;
  }
  mean_lse /= static_cast<double>(n);

  return d / 2.0 + (d / 2.0) * std::log(2.0 * M_PI * sigma2) +
         std::log(static_cast<double>(n)) - mean_lse;
}

MIEstimate kde_mi_label(const std::vector<int>& y, const SampleMatrix& t,
                        const KdeConfig& cfg) {
  validate_samples(t, "kde activations");
  if (y.size() != static_cast<std::size_t>(t.rows())) {
    throw DataError("kde_mi_label got " + std::to_string(y.size()) +
                    " labels for " + std::to_string(t.rows()) + " samples");
  }

  std::map<int, std::vector<Eigen::Index>> by_class;
  for (std::size_t i = 0; i < y.size(); ++i) {
    by_class[y[i]].push_back(static_cast<Eigen::Index>(i));
  }

  MIEstimate est;
  est.estimator = EstimatorKind::kKde;

  std::vector<Eigen::Index> kept_rows;
  std::map<int, std::vector<Eigen::Index>> kept_classes;
  for (const auto& [label, rows] : by_class) {
    if (rows.size() < 2) {
      est.flags.emplace_back("class_excluded");
      continue;
    }
    kept_classes[label] = rows;
    kept_rows.insert(kept_rows.end(), rows.begin(), rows.end());
  }
  if (kept_classes.empty()) {
    throw DataError("kde_mi_label: every class has fewer than 2 samples");
  }

  SampleMatrix kept(static_cast<Eigen::Index>(kept_rows.size()), t.cols());
  for (std::size_t i = 0; i < kept_rows.size(); ++i) {
    kept.row(static_cast<Eigen::Index>(i)) = t.row(kept_rows[i]);
  }
  const double sigma2 =
      cfg.bandwidth > 0.0 ? cfg.bandwidth : default_bandwidth(kept);

  double i_nats = 0.0;
  if (kept_classes.size() >= 2) {
    const double h_t = kde_entropy_upper_nats(kept, sigma2);
    double h_t_given_y = 0.0;
    for (const auto& [label, rows] : kept_classes) {
      (void)label;
      SampleMatrix part(static_cast<Eigen::Index>(rows.size()), t.cols());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        part.row(static_cast<Eigen::Index>(i)) = t.row(rows[i]);
      }
      const double p =
          static_cast<double>(rows.size()) / static_cast<double>(kept.rows());
      h_t_given_y += p * kde_entropy_upper_nats(part, sigma2);
    }
    i_nats = h_t - h_t_given_y;
  }

  est.bits = std::max(i_nats / kLog2, 0.0);
  est.config["bandwidth"] = sigma2;
  est.config["bandwidth_rule"] =
      cfg.bandwidth > 0.0 ? "fixed" : "0.1_mean_column_variance";
  est.config["n_classes_used"] = kept_classes.size();
  est.config["n_samples_used"] = kept.rows();
  return est;
}

}  // namespace ibsplit::mi
