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

#include "ibsplit/nn/network.hpp"

#include <cmath>
#include <limits>

#include "ibsplit/common/error.hpp"

namespace ibsplit::nn {

SeqModel SeqModel::build(std::size_t input_dim, std::size_t seq_len,
                         const std::vector<std::size_t>& encoder_cells,
                         const std::vector<std::size_t>& decoder_hidden,
                         std::size_t n_classes, std::mt19937_64& rng) {
  if (encoder_cells.empty()) {
    throw ConfigError("SeqModel needs at least one encoder layer");
  }
  SeqModel m;
  m.input_dim = input_dim;
  m.seq_len = seq_len;
  m.n_classes = n_classes;

  std::size_t in = input_dim;
  for (std::size_t cells : encoder_cells) {
    LstmLayer layer(in, cells);
    init_lstm(layer, rng);
    m.encoder.push_back(std::move(layer));
    in = cells;
  }
  for (std::size_t width : decoder_hidden) {
    DenseLayer layer(in, width, Activation::kTanh);
    init_dense(layer, rng);
    m.head.push_back(std::move(layer));
    in = width;
  }
  DenseLayer readout(in, n_classes, Activation::kSoftmax);
  init_dense(readout, rng);
  m.head.push_back(std::move(readout));
  return m;
}

std::vector<Parameter*> SeqModel::parameters() {
  std::vector<Parameter*> out;
  for (auto& l : encoder) {
    out.push_back(&l.w_input);
    out.push_back(&l.w_recur);
    out.push_back(&l.bias);
  }
  for (auto& l : head) {
    out.push_back(&l.weights);
    out.push_back(&l.bias);
  }
  return out;
}

std::vector<const Parameter*> SeqModel::parameters() const {
  std::vector<const Parameter*> out;
  for (const auto& l : encoder) {
    out.push_back(&l.w_input);
    out.push_back(&l.w_recur);
    out.push_back(&l.bias);
  }
  for (const auto& l : head) {
    out.push_back(&l.weights);
    out.push_back(&l.bias);
  }
  return out;
}

Eigen::MatrixXd SeqModel::encode(const BatchSeq& x,
                                 std::vector<LstmCache>* caches) const {
  if (caches) caches->assign(encoder.size(), {});
  const BatchSeq* current = &x;
  BatchSeq next;
  for (std::size_t l = 0; l < encoder.size(); ++l) {
    LstmCache* cache = caches ? &(*caches)[l] : nullptr;
    LstmCache local;
    next = lstm_forward_batch(encoder[l], *current, cache ? cache : &local);
    current = cache ? &cache->hidden : &next;
  }
  return current->block(current->t_len - 1);
}

Eigen::MatrixXd SeqModel::decode_latent(const Eigen::MatrixXd& latent,
                                        std::size_t t_len,
                                        ForwardCache* cache) const {
  const auto n = static_cast<std::size_t>(latent.rows());
  BatchSeq dec(n, t_len, static_cast<std::size_t>(latent.cols()));
  for (std::size_t t = 0; t < t_len; ++t) dec.block(t) = latent;

  if (cache) cache->head.assign(head.size(), {});
  Eigen::MatrixXd h = dec.values;
  for (std::size_t l = 0; l < head.size(); ++l) {
    DenseCache* dc = cache ? &cache->head[l] : nullptr;
    h = dense_forward(head[l], h, dc);
  }
  if (cache) {
    cache->decoder_input = std::move(dec);
    cache->probs = h;
  }
  return h;
}

Eigen::MatrixXd SeqModel::forward(const BatchSeq& x,
                                  ForwardCache* cache) const {
  Eigen::MatrixXd latent = encode(x, cache ? &cache->lstm : nullptr);
  return decode_latent(latent, x.t_len, cache);
}

LossStats cross_entropy(const Eigen::MatrixXd& probs,
                        const std::vector<int>& targets) {
  if (static_cast<std::size_t>(probs.rows()) != targets.size()) {
    throw ShapeError("cross_entropy: " + std::to_string(probs.rows()) +
                     " probability rows vs " + std::to_string(targets.size()) +
                     " targets");
  }
  constexpr double kFloor = 1e-300;
  double loss = 0.0;
  std::size_t correct = 0;
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    const int y = targets[static_cast<std::size_t>(r)];
    loss -= std::log(std::max(probs(r, y), kFloor));
    Eigen::Index argmax = 0;
    probs.row(r).maxCoeff(&argmax);
    if (argmax == y) ++correct;
  }
  const auto rows = static_cast<double>(probs.rows());
  return {loss / rows, static_cast<double>(correct) / rows};
}

Eigen::MatrixXd cross_entropy_grad(const Eigen::MatrixXd& probs,
                                   const std::vector<int>& targets) {
  const auto rows = static_cast<double>(probs.rows());
  Eigen::MatrixXd d = probs / rows;
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    d(r, targets[static_cast<std::size_t>(r)]) -= 1.0 / rows;
  }
  return d;
}

Eigen::MatrixXd dense_stack_backward(std::vector<DenseLayer>& stack,
                                     const std::vector<DenseCache>& caches,
                                     const Eigen::MatrixXd& d_logits) {
  Eigen::MatrixXd d = d_logits;
  for (std::size_t l = stack.size(); l-- > 0;) {
    DenseLayer& layer = stack[l];
    const DenseCache& cache = caches[l];
    if (l + 1 == stack.size()) {
      // d is already the pre-activation (logit) gradient.
      layer.weights.grad.matrix() += d.transpose() * cache.input;
      layer.bias.grad.vector() += d.colwise().sum().transpose();
      d = d * layer.weights.value.matrix();
    } else {
      d = dense_backward(layer, cache, d);
    }
  }
  return d;
}

void encoder_backward(std::vector<LstmLayer>& encoder, const BatchSeq& x,
                      const std::vector<LstmCache>& caches,
                      const Eigen::MatrixXd& d_final_hidden) {
  const std::size_t n = x.n;
  const std::size_t t_len = x.t_len;
  BatchSeq d_hidden(n, t_len, encoder.back().cells());
  d_hidden.block(t_len - 1) = d_final_hidden;
  for (std::size_t l = encoder.size(); l-- > 0;) {
    const BatchSeq& input = (l == 0) ? x : caches[l - 1].hidden;
    BatchSeq d_input;
    lstm_backward_batch(encoder[l], input, caches[l], d_hidden,
                        l > 0 ? &d_input : nullptr);
    if (l > 0) d_hidden = std::move(d_input);
  }
}

Eigen::MatrixXd sum_over_timesteps(const Eigen::MatrixXd& d_rows,
                                   std::size_t n, std::size_t t_len) {
  Eigen::MatrixXd out =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), d_rows.cols());
  for (std::size_t t = 0; t < t_len; ++t) {
    out += d_rows.middleRows(static_cast<Eigen::Index>(t * n),
                             static_cast<Eigen::Index>(n));
  }
  return out;
}

LossStats backward(SeqModel& model, const Batch& batch) {
  for (Parameter* p : model.parameters()) p->zero_grad();

  ForwardCache cache;
  model.forward(batch.x, &cache);
  LossStats stats = cross_entropy(cache.probs, batch.y);

  Eigen::MatrixXd d_logits = cross_entropy_grad(cache.probs, batch.y);
  Eigen::MatrixXd d_dec = dense_stack_backward(model.head, cache.head, d_logits);
  Eigen::MatrixXd d_latent = sum_over_timesteps(d_dec, batch.x.n, batch.x.t_len);
  encoder_backward(model.encoder, batch.x, cache.lstm, d_latent);
  return stats;
}

std::vector<LayerActivations> record_activations(
    const std::vector<LstmLayer>& encoder, const BatchSeq& probe,
    std::size_t epoch, int phase) {
  std::vector<LayerActivations> records;
  records.reserve(encoder.size());
  BatchSeq current = probe;
  for (std::size_t l = 0; l < encoder.size(); ++l) {
    BatchSeq next = lstm_forward_batch(encoder[l], current);

    LayerActivations rec;
    rec.phase = phase;
    rec.epoch = epoch;
    rec.layer = l + 1;
    rec.n = next.n;
    rec.t_len = next.t_len;
    rec.cells = next.dim();
    rec.states.resize(static_cast<Eigen::Index>(rec.n),
                      static_cast<Eigen::Index>(rec.t_len * rec.cells));
    for (std::size_t t = 0; t < rec.t_len; ++t) {
      rec.states.middleCols(static_cast<Eigen::Index>(t * rec.cells),
                            static_cast<Eigen::Index>(rec.cells)) =
          next.block(t);
    }
    records.push_back(std::move(rec));
    current = std::move(next);
  }
  return records;
}

std::vector<LayerActivations> record_activations(const SeqModel& model,
                                                 const BatchSeq& probe,
                                                 std::size_t epoch,
                                                 int phase) {
  return record_activations(model.encoder, probe, epoch, phase);
}

}  // namespace ibsplit::nn
