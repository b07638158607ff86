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

#ifndef IBSPLIT_NN_TENSOR_HPP_
#define IBSPLIT_NN_TENSOR_HPP_

#include <Eigen/Core>
#include <cstddef>
#include <string>
#include <vector>

namespace ibsplit::nn {

using RowMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Element storage aligned to Eigen's packet boundary. Keeping every owning
/// buffer packet-aligned makes vectorized traversals start at offset zero
/// regardless of where the allocation landed, so results are bit-identical
/// across repeated runs in one process.
using AlignedVector = std::vector<double, Eigen::aligned_allocator<double>>;

/// Formats a shape as "[r x c]" for error messages.
std::string shape_string(const std::vector<std::size_t>& shape);

/// Dense n-dimensional array of doubles in row-major order. Rank 1 and 2 are
/// the only ranks the layers use; higher ranks are supported for storage.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape);
  Tensor(std::vector<std::size_t> shape, std::vector<double> values);

  static Tensor zeros(std::vector<std::size_t> shape) {
    return Tensor(std::move(shape));
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }

  AlignedVector& values() { return values_; }
  const AlignedVector& values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Rank-2 accessors; throw ShapeError when the rank does not match.
  std::size_t rows() const;
  std::size_t cols() const;
  double& at(std::size_t r, std::size_t c);
  double at(std::size_t r, std::size_t c) const;

  Eigen::Map<RowMatrixXd> matrix();
  Eigen::Map<const RowMatrixXd> matrix() const;
  Eigen::Map<Eigen::VectorXd> vector();
  Eigen::Map<const Eigen::VectorXd> vector() const;

  void fill(double v);
  void set_zero() { fill(0.0); }
  bool all_finite() const;

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

 private:
  std::vector<std::size_t> shape_;
  AlignedVector values_;
};

/// Trainable tensor with its gradient buffer and freeze flag. A frozen
/// parameter keeps bit-identical values across any number of optimizer steps.
struct Parameter {
  Tensor value;
  Tensor grad;
  bool frozen = false;

  Parameter() = default;
  explicit Parameter(std::vector<std::size_t> shape)
      : value(shape), grad(std::move(shape)) {}

  void zero_grad() { grad.set_zero(); }
};

}  // namespace ibsplit::nn

#endif  // IBSPLIT_NN_TENSOR_HPP_
