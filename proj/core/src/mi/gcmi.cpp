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

#include "ibsplit/mi/gcmi.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include "ibsplit/common/error.hpp"

namespace ibsplit::mi {

namespace {

constexpr double kLog2 = 0.6931471805599453;
constexpr double kRidge = 1e-10;

// Average ranks in [1, n]; ties share the mean of the ranks they span.
Eigen::VectorXd average_ranks(const Eigen::VectorXd& col) {
  const auto n = static_cast<std::size_t>(col.size());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    return col[static_cast<Eigen::Index>(a)] <
           col[static_cast<Eigen::Index>(b)];
  });

  Eigen::VectorXd ranks(col.size());
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n &&
           col[static_cast<Eigen::Index>(order[j + 1])] ==
               col[static_cast<Eigen::Index>(order[i])]) {
      ++j;
    }
    // Positions i..j (0-based) share the average 1-based rank.
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      ranks[static_cast<Eigen::Index>(order[k])] = avg;
    }
    i = j + 1;
  }
  return ranks;
}

// Halves of the log-det via Cholesky; applies the ridge when the plain
// factorization fails and reports it through *ridged.
double half_log_det(const Eigen::MatrixXd& cov, bool* ridged) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    Eigen::MatrixXd reg = cov;
    reg.diagonal().array() += kRidge;
    llt.compute(reg);
    if (llt.info() != Eigen::Success) {
      throw NumericError(
          "covariance is not positive definite even after ridge "
          "regularization");
    }
    if (ridged) *ridged = true;
  }
  return llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace

SampleMatrix copula_transform(const SampleMatrix& x) {
  validate_samples(x, "copula_transform input");
  if (x.rows() < 3) {
    throw DataError("copula_transform needs at least 3 samples, got " +
                    std::to_string(x.rows()));
  }
  const boost::math::normal_distribution<double> normal;
  const double denom = static_cast<double>(x.rows()) + 1.0;
  SampleMatrix out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Eigen::VectorXd ranks = average_ranks(x.col(j));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      out(i, j) = boost::math::quantile(normal, ranks[i] / denom);
    }
  }
  return out;
}

double gaussian_entropy_nats(const SampleMatrix& data, bool* ridged) {
  validate_samples(data, "gaussian_entropy input");
  const auto n = static_cast<double>(data.rows());
  const auto d = static_cast<double>(data.cols());
  if (data.rows() <= data.cols()) {
    throw DataError("gaussian entropy needs n > d, got n=" +
                    std::to_string(data.rows()) + " d=" +
                    std::to_string(data.cols()));
  }

  const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / (n - 1.0);

  double h = half_log_det(cov, ridged);
  h += 0.5 * d * (std::log(2.0 * M_PI) + 1.0);

  // Small-sample bias correction for a Gaussian entropy estimate from the
  // sample covariance (psi-function expansion).
  const double dterm = (kLog2 - std::log(n - 1.0)) / 2.0;
  h -= d * dterm;
  for (Eigen::Index i = 1; i <= data.cols(); ++i) {
    h -= 0.5 * boost::math::digamma((n - static_cast<double>(i)) / 2.0);
  }
  return h;
}

namespace {

MIEstimate gcmi_on_copula(const SampleMatrix& cx, const SampleMatrix& cy) {
  SampleMatrix joint(cx.rows(), cx.cols() + cy.cols());
  joint << cx, cy;

  bool ridged = false;
  const double hx = gaussian_entropy_nats(cx, &ridged);
  const double hy = gaussian_entropy_nats(cy, &ridged);
  const double hxy = gaussian_entropy_nats(joint, &ridged);

  MIEstimate est;
  est.estimator = EstimatorKind::kGcmi;
  est.bits = (hx + hy - hxy) / kLog2;
  est.config["dx"] = cx.cols();
  est.config["dy"] = cy.cols();
  est.config["n_samples"] = cx.rows();
  if (ridged) est.flags.emplace_back("ridge_regularized");
  if (cx.rows() < 10 * (cx.cols() + cy.cols())) {
    est.flags.emplace_back("small_sample");
  }
  return est;
}

}  // namespace

MIEstimate gcmi(const SampleMatrix& x, const SampleMatrix& y) {
  if (x.rows() != y.rows()) {
    throw DataError("gcmi sample counts differ: " + std::to_string(x.rows()) +
                    " vs " + std::to_string(y.rows()));
  }
  return gcmi_on_copula(copula_transform(x), copula_transform(y));
}

MIEstimate conditional_gcmi(const SampleMatrix& x, const SampleMatrix& y,
                            const SampleMatrix& z) {
  if (x.rows() != y.rows() || x.rows() != z.rows()) {
    throw DataError("conditional_gcmi sample counts differ: " +
                    std::to_string(x.rows()) + "/" + std::to_string(y.rows()) +
                    "/" + std::to_string(z.rows()));
  }
  const SampleMatrix cx = copula_transform(x);
  const SampleMatrix cy = copula_transform(y);
  const SampleMatrix cz = copula_transform(z);

  SampleMatrix xz(cx.rows(), cx.cols() + cz.cols());
  xz << cx, cz;
  SampleMatrix yz(cy.rows(), cy.cols() + cz.cols());
  yz << cy, cz;
  SampleMatrix xyz(cx.rows(), cx.cols() + cy.cols() + cz.cols());
  xyz << cx, cy, cz;

  bool ridged = false;
  const double hxz = gaussian_entropy_nats(xz, &ridged);
  const double hyz = gaussian_entropy_nats(yz, &ridged);
  const double hxyz = gaussian_entropy_nats(xyz, &ridged);
  const double hz = gaussian_entropy_nats(cz, &ridged);

  MIEstimate est;
  est.estimator = EstimatorKind::kConditionalGcmi;
  est.bits = (hxz + hyz - hxyz - hz) / kLog2;
  est.config["dx"] = x.cols();
  est.config["dy"] = y.cols();
  est.config["conditioning_dims"] = z.cols();
  est.config["n_samples"] = x.rows();
  if (ridged) est.flags.emplace_back("ridge_regularized");
  if (x.rows() < 10 * (x.cols() + y.cols() + z.cols())) {
    est.flags.emplace_back("small_sample");
  }
  return est;
}

}  // namespace ibsplit::mi
