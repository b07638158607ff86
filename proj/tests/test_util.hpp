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

#ifndef IBSPLIT_TESTS_TEST_UTIL_HPP_
#define IBSPLIT_TESTS_TEST_UTIL_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace ibsplit::testutil {

/// Fresh per-test scratch directory under the system temp dir; removed and
/// recreated so reruns start clean.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / ("ibsplit_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

/// Bivariate standard Gaussian pairs with correlation rho.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> correlated_gaussian(
    std::size_t n, double rho, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 1);
  Eigen::MatrixXd y(static_cast<Eigen::Index>(n), 1);
  const double tail = std::sqrt(1.0 - rho * rho);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = normal(rng);
    const double b = normal(rng);
    x(static_cast<Eigen::Index>(i), 0) = a;
    y(static_cast<Eigen::Index>(i), 0) = rho * a + tail * b;
  }
  return {x, y};
}

/// Closed-form MI of a bivariate Gaussian with correlation rho, in bits.
inline double gaussian_mi_bits(double rho) {
  return -0.5 * std::log2(1.0 - rho * rho);
}

}  // namespace ibsplit::testutil

#endif  // IBSPLIT_TESTS_TEST_UTIL_HPP_
