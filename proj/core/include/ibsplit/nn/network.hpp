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

#ifndef IBSPLIT_NN_NETWORK_HPP_
#define IBSPLIT_NN_NETWORK_HPP_

#include <cstddef>
#include <random>
#include <vector>

#include "ibsplit/nn/layers.hpp"

namespace ibsplit::nn {

/// Input batch with per-timestep class targets, target index t*n + i matches
/// the time-major row layout of BatchSeq.
struct Batch {
  BatchSeq x;
  std::vector<int> y;
};

struct ForwardCache {
  std::vector<LstmCache> lstm;     // one per encoder layer
  BatchSeq decoder_input;          // final latent repeated across timesteps
  std::vector<DenseCache> head;    // one per head layer
  Eigen::MatrixXd probs;           // (t_len*n) x n_classes
};

/// Sequence classifier: LSTM encoder stack, final hidden state of the last
/// layer as the latent code, then a time-distributed dense head over the
/// latent repeated at every timestep, ending in softmax class probabilities.
struct SeqModel {
  std::size_t input_dim = 0;
  std::size_t seq_len = 0;
  std::size_t n_classes = 0;
  std::vector<LstmLayer> encoder;
  std::vector<DenseLayer> head;

  static SeqModel build(std::size_t input_dim, std::size_t seq_len,
                        const std::vector<std::size_t>& encoder_cells,
                        const std::vector<std::size_t>& decoder_hidden,
                        std::size_t n_classes, std::mt19937_64& rng);

  std::size_t latent_dim() const { return encoder.back().cells(); }

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;

  /// Runs the encoder stack; returns the final-timestep hidden state of the
  /// last layer (n x latent_dim). Fills per-layer caches when given.
  Eigen::MatrixXd encode(const BatchSeq& x,
                         std::vector<LstmCache>* caches = nullptr) const;

  /// Repeats the latent across seq_len timesteps and applies the head.
  Eigen::MatrixXd decode_latent(const Eigen::MatrixXd& latent,
                                std::size_t t_len,
                                ForwardCache* cache = nullptr) const;

  /// Full forward pass; returns (t_len*n) x n_classes probabilities.
  Eigen::MatrixXd forward(const BatchSeq& x,
                          ForwardCache* cache = nullptr) const;
};

struct LossStats {
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Mean per-timestep categorical cross-entropy (natural log) and argmax
/// accuracy. `targets[t*n+i]` pairs with probability row t*n+i.
LossStats cross_entropy(const Eigen::MatrixXd& probs,
                        const std::vector<int>& targets);

/// Gradient of the mean cross-entropy w.r.t. the softmax logits.
Eigen::MatrixXd cross_entropy_grad(const Eigen::MatrixXd& probs,
                                   const std::vector<int>& targets);

/// Backpropagates d_logits through a dense stack whose last layer is softmax
/// (differentiated fused with cross-entropy; d_logits must be the
/// pre-activation gradient). Accumulates parameter gradients and returns the
/// gradient w.r.t. the stack input.
Eigen::MatrixXd dense_stack_backward(std::vector<DenseLayer>& stack,
                                     const std::vector<DenseCache>& caches,
                                     const Eigen::MatrixXd& d_logits);

/// Backpropagates through an LSTM stack given the gradient w.r.t. the final
/// timestep of the top layer's hidden state. Accumulates parameter gradients.
void encoder_backward(std::vector<LstmLayer>& encoder, const BatchSeq& x,
                      const std::vector<LstmCache>& caches,
                      const Eigen::MatrixXd& d_final_hidden);

/// Collapses the gradient of a repeated-latent decoder input back onto the
/// latent: sums the (t_len*n) x d rows over timesteps into n x d.
Eigen::MatrixXd sum_over_timesteps(const Eigen::MatrixXd& d_rows,
                                   std::size_t n, std::size_t t_len);

/// Forward + backward for the whole model. Parameter gradients are zeroed
/// first and then filled for every parameter (frozen ones included; the
/// optimizer is what ignores them). Returns loss statistics for the batch.
LossStats backward(SeqModel& model, const Batch& batch);

/// Recorded hidden states of one layer over a probe batch: row i holds the
/// concatenation [h_1 h_2 ... h_T] for sample i (t-major columns).
struct LayerActivations {
  int phase = 1;
  std::size_t epoch = 0;
  std::size_t layer = 1;  // 1-based encoder layer index
  std::size_t n = 0;
  std::size_t t_len = 0;
  std::size_t cells = 0;
  Eigen::MatrixXd states;  // n x (t_len*cells)

  auto timestep(std::size_t t) const {
    return states.middleCols(static_cast<Eigen::Index>(t * cells),
                             static_cast<Eigen::Index>(cells));
  }
};

/// Records every encoder layer's full per-timestep hidden states on the probe
/// batch. Deterministic: two calls with identical weights give bit-identical
/// records.
std::vector<LayerActivations> record_activations(
    const std::vector<LstmLayer>& encoder, const BatchSeq& probe,
    std::size_t epoch, int phase);

std::vector<LayerActivations> record_activations(const SeqModel& model,
                                                 const BatchSeq& probe,
                                                 std::size_t epoch,
                                                 int phase = 1);

}  // namespace ibsplit::nn

#endif  // IBSPLIT_NN_NETWORK_HPP_
