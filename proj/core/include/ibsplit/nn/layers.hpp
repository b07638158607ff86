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

#ifndef IBSPLIT_NN_LAYERS_HPP_
#define IBSPLIT_NN_LAYERS_HPP_

#include <Eigen/Core>
#include <cstddef>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ibsplit/nn/tensor.hpp"

namespace ibsplit::nn {

enum class Activation { kTanh, kSigmoid, kRelu, kSoftmax, kLinear };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

/// Applies the activation row-wise in place. Softmax normalizes each row.
void apply_activation(Activation a, Eigen::MatrixXd& z);

/// Fully connected layer y = act(W x + b); applied time-distributed when the
/// input rows enumerate (sample, timestep) pairs.
struct DenseLayer {
  Parameter weights;  // out x in
  Parameter bias;     // out
  Activation activation = Activation::kLinear;

  DenseLayer() = default;
  DenseLayer(std::size_t in, std::size_t out, Activation act)
      : weights({out, in}), bias({out}), activation(act) {}

  std::size_t in_dim() const { return weights.value.cols(); }
  std::size_t out_dim() const { return weights.value.rows(); }
};

/// Batch of equally long sequences in time-major storage: row t*n + i holds
/// sample i at timestep t, so each timestep is one contiguous block.
struct BatchSeq {
  std::size_t n = 0;      // samples
  std::size_t t_len = 0;  // timesteps
  Eigen::MatrixXd values; // (t_len * n) x dim

  BatchSeq() = default;
  BatchSeq(std::size_t n_samples, std::size_t t, std::size_t dim)
      : n(n_samples), t_len(t),
        values(Eigen::MatrixXd::Zero(
            static_cast<Eigen::Index>(n_samples * t), dim)) {}

  std::size_t dim() const { return static_cast<std::size_t>(values.cols()); }

  auto block(std::size_t t) {
    return values.middleRows(static_cast<Eigen::Index>(t * n),
                             static_cast<Eigen::Index>(n));
  }
  auto block(std::size_t t) const {
    return values.middleRows(static_cast<Eigen::Index>(t * n),
                             static_cast<Eigen::Index>(n));
  }
};

struct DenseCache {
  Eigen::MatrixXd input;   // rows x in
  Eigen::MatrixXd output;  // rows x out, post-activation
};

/// rows x in -> rows x out. Checks the inner dimension and names both shapes
/// on mismatch.
Eigen::MatrixXd dense_forward(const DenseLayer& layer,
                              const Eigen::MatrixXd& x,
                              DenseCache* cache = nullptr);

/// Spec-level convenience: single input vector through the layer.
Tensor dense_forward(const Tensor& x, const DenseLayer& layer);

/// Backprop for tanh/sigmoid/relu/linear heads. `d_output` is the loss
/// gradient w.r.t. the post-activation output. Accumulates into the layer's
/// parameter gradients and returns the gradient w.r.t. the input.
/// Softmax layers are only differentiated through the fused cross-entropy
/// path in network.cpp.
Eigen::MatrixXd dense_backward(DenseLayer& layer, const DenseCache& cache,
                               const Eigen::MatrixXd& d_output);

/// LSTM layer with stacked gate blocks in order [input, forget, candidate,
/// output]; sigmoid gates, tanh candidate and cell output.
struct LstmLayer {
  Parameter w_input;  // 4*cells x in
  Parameter w_recur;  // 4*cells x cells
  Parameter bias;     // 4*cells

  LstmLayer() = default;
  LstmLayer(std::size_t in, std::size_t n_cells)
      : w_input({4 * n_cells, in}), w_recur({4 * n_cells, n_cells}),
        bias({4 * n_cells}) {}

  std::size_t cells() const { return w_recur.value.cols(); }
  std::size_t in_dim() const { return w_input.value.cols(); }
};

struct LstmCache {
  BatchSeq hidden;  // h_t
  BatchSeq cell;    // c_t
  // Post-activation gate values per timestep, each n x cells.
  std::vector<Eigen::MatrixXd> gate_i, gate_f, gate_g, gate_o;
};

/// Runs the recurrence over the whole batch with h0 = c0 = 0 (stateless
/// windows). Returns the full hidden sequence; fills `cache` when given.
/// Throws NumericError naming the timestep if a state goes non-finite.
BatchSeq lstm_forward_batch(const LstmLayer& layer, const BatchSeq& input,
                            LstmCache* cache = nullptr);

/// Spec-level single-sequence form with explicit initial state. Returns the
/// per-timestep (hidden, cell) sequences, both T x cells.
std::pair<Tensor, Tensor> lstm_forward(const Tensor& seq,
                                       const LstmLayer& layer,
                                       const Tensor& h0, const Tensor& c0);

/// BPTT. `d_hidden` carries the loss gradient w.r.t. every h_t (zero rows for
/// timesteps nothing consumed). Accumulates parameter gradients; writes the
/// input-sequence gradient into `d_input` when non-null.
void lstm_backward_batch(LstmLayer& layer, const BatchSeq& input,
                         const LstmCache& cache, const BatchSeq& d_hidden,
                         BatchSeq* d_input = nullptr);

/// Uniform init in +-1/sqrt(fan_in), biases zero.
void init_dense(DenseLayer& layer, std::mt19937_64& rng);
void init_lstm(LstmLayer& layer, std::mt19937_64& rng);

}  // namespace ibsplit::nn

#endif  // IBSPLIT_NN_LAYERS_HPP_
