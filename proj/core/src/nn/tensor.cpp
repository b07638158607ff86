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

#include "ibsplit/nn/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "ibsplit/common/error.hpp"

namespace ibsplit::nn {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

}  // namespace

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << "x";
    os << shape[i];
  }
  os << "]";
  return os.str();
}

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), values_(shape_product(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(values.begin(), values.end()) {
  if (shape_product(shape_) != values_.size()) {
    throw ShapeError("tensor shape " + shape_string(shape_) + " expects " +
                     std::to_string(shape_product(shape_)) +
                     " values, got " + std::to_string(values_.size()));
  }
}

std::size_t Tensor::rows() const {
  if (rank() != 2) {
    throw ShapeError("rows() requires rank-2 tensor, shape is " +
                     shape_string(shape_));
  }
  return shape_[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) {
    throw ShapeError("cols() requires rank-2 tensor, shape is " +
                     shape_string(shape_));
  }
  return shape_[1];
}

double& Tensor::at(std::size_t r, std::size_t c) {
  return values_[r * cols() + c];
}

double Tensor::at(std::size_t r, std::size_t c) const {
  return values_[r * cols() + c];
}

Eigen::Map<RowMatrixXd> Tensor::matrix() {
  return {data(), static_cast<Eigen::Index>(rows()),
          static_cast<Eigen::Index>(cols())};
}

Eigen::Map<const RowMatrixXd> Tensor::matrix() const {
  return {data(), static_cast<Eigen::Index>(rows()),
          static_cast<Eigen::Index>(cols())};
}

Eigen::Map<Eigen::VectorXd> Tensor::vector() {
  return {data(), static_cast<Eigen::Index>(size())};
}

Eigen::Map<const Eigen::VectorXd> Tensor::vector() const {
  return {data(), static_cast<Eigen::Index>(size())};
}

void Tensor::fill(double v) {
  std::fill(values_.begin(), values_.end(), v);
}

bool Tensor::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace ibsplit::nn
