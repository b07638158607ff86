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

#include "ibsplit/nn/layers.hpp"

#include <cmath>
#include <stdexcept>

#include "ibsplit/common/error.hpp"

namespace ibsplit::nn {

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::kTanh: return "tanh";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kRelu: return "relu";
    case Activation::kSoftmax: return "softmax";
    case Activation::kLinear: return "linear";
  }
  throw std::logic_error("unreachable activation");
}

Activation activation_from_name(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "relu") return Activation::kRelu;
  if (name == "softmax") return Activation::kSoftmax;
  if (name == "linear") return Activation::kLinear;
  throw ConfigError("unknown activation: " + name);
}

void apply_activation(Activation a, Eigen::MatrixXd& z) {
  switch (a) {
    case Activation::kTanh:
      z = z.array().tanh();
      break;
    case Activation::kSigmoid:
      z = 0.5 * ((0.5 * z).array().tanh() + 1.0);
      break;
    case Activation::kRelu:
      z = z.array().max(0.0);
      break;
    case Activation::kSoftmax: {
      Eigen::VectorXd row_max = z.rowwise().maxCoeff();
      z = (z.colwise() - row_max).array().exp();
      Eigen::VectorXd row_sum = z.rowwise().sum();
      z.array().colwise() /= row_sum.array();
      break;
    }
    case Activation::kLinear:
      break;
  }
}

namespace {

std::string dims(const Eigen::MatrixXd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

// Derivative of the activation expressed through the post-activation output.
Eigen::ArrayXXd activation_grad_from_output(Activation a,
                                            const Eigen::MatrixXd& y) {
  switch (a) {
    case Activation::kTanh:
      return 1.0 - y.array().square();
    case Activation::kSigmoid:
      return y.array() * (1.0 - y.array());
    case Activation::kRelu:
      return (y.array() > 0.0).cast<double>();
    case Activation::kLinear:
      return Eigen::ArrayXXd::Ones(y.rows(), y.cols());
    case Activation::kSoftmax:
      throw NumericError(
          "softmax backward is only available through the fused "
          "cross-entropy loss");
  }
  throw std::logic_error("unreachable activation");
}

}  // namespace

Eigen::MatrixXd dense_forward(const DenseLayer& layer,
                              const Eigen::MatrixXd& x, DenseCache* cache) {
  if (static_cast<std::size_t>(x.cols()) != layer.in_dim()) {
    throw ShapeError("dense_forward: input " + dims(x) +
                     " does not match weights " +
                     std::to_string(layer.out_dim()) + "x" +
                     std::to_string(layer.in_dim()));
  }
  Eigen::MatrixXd z = x * layer.weights.value.matrix().transpose();
  z.rowwise() += layer.bias.value.vector().transpose();
  apply_activation(layer.activation, z);
  if (cache) {
    cache->input = x;
    cache->output = z;
  }
  return z;
}

Tensor dense_forward(const Tensor& x, const DenseLayer& layer) {
  Eigen::MatrixXd row(1, static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) row(0, static_cast<long>(i)) = x[i];
  Eigen::MatrixXd y = dense_forward(layer, row);
  std::vector<double> out(y.data(), y.data() + y.size());
  return Tensor({layer.out_dim()}, std::move(out));
}

Eigen::MatrixXd dense_backward(DenseLayer& layer, const DenseCache& cache,
                               const Eigen::MatrixXd& d_output) {
  Eigen::MatrixXd dz =
      (d_output.array() *
       activation_grad_from_output(layer.activation, cache.output))
          .matrix();
  layer.weights.grad.matrix() += (dz.transpose() * cache.input);
  layer.bias.grad.vector() += dz.colwise().sum().transpose();
  return dz * layer.weights.value.matrix();
}

BatchSeq lstm_forward_batch(const LstmLayer& layer, const BatchSeq& input,
                            LstmCache* cache) {
  if (input.dim() != layer.in_dim()) {
    throw ShapeError("lstm_forward: input dim " + std::to_string(input.dim()) +
                     " does not match layer input dim " +
                     std::to_string(layer.in_dim()));
  }
  const std::size_t n = input.n;
  const std::size_t t_len = input.t_len;
  const auto cells = static_cast<Eigen::Index>(layer.cells());

  BatchSeq hidden(n, t_len, layer.cells());
  BatchSeq cell_seq(n, t_len, layer.cells());
  if (cache) {
    cache->gate_i.assign(t_len, {});
    cache->gate_f.assign(t_len, {});
    cache->gate_g.assign(t_len, {});
    cache->gate_o.assign(t_len, {});
  }

  const auto& wx = layer.w_input.value.matrix();
  const auto& wh = layer.w_recur.value.matrix();
  const auto bias = layer.bias.value.vector();

  Eigen::MatrixXd h_prev = Eigen::MatrixXd::Zero(n, cells);
  Eigen::MatrixXd c_prev = Eigen::MatrixXd::Zero(n, cells);
  Eigen::MatrixXd gates;

  for (std::size_t t = 0; t < t_len; ++t) {
    gates.noalias() = input.block(t) * wx.transpose();
    gates.noalias() += h_prev * wh.transpose();
    gates.rowwise() += bias.transpose();

    auto zi = gates.leftCols(cells);
    auto zf = gates.middleCols(cells, cells);
    auto zg = gates.middleCols(2 * cells, cells);
    auto zo = gates.rightCols(cells);

    Eigen::MatrixXd gi = (0.5 * ((0.5 * zi).array().tanh() + 1.0)).matrix();
    Eigen::MatrixXd gf = (0.5 * ((0.5 * zf).array().tanh() + 1.0)).matrix();
    Eigen::MatrixXd gg = zg.array().tanh().matrix();
    Eigen::MatrixXd go = (0.5 * ((0.5 * zo).array().tanh() + 1.0)).matrix();

    Eigen::MatrixXd c =
        (gf.array() * c_prev.array() + gi.array() * gg.array()).matrix();
    Eigen::MatrixXd h = (go.array() * c.array().tanh()).matrix();

    if (!h.allFinite() || !c.allFinite()) {
      throw NumericError("lstm_forward: non-finite state at timestep " +
                         std::to_string(t + 1));
    }

    hidden.block(t) = h;
    cell_seq.block(t) = c;
    if (cache) {
      cache->gate_i[t] = std::move(gi);
      cache->gate_f[t] = std::move(gf);
      cache->gate_g[t] = std::move(gg);
      cache->gate_o[t] = std::move(go);
    }
    h_prev = h;
    c_prev = std::move(c);
  }

  if (cache) {
    cache->cell = std::move(cell_seq);
    cache->hidden = hidden;
  }
  return hidden;
}

std::pair<Tensor, Tensor> lstm_forward(const Tensor& seq,
                                       const LstmLayer& layer,
                                       const Tensor& h0, const Tensor& c0) {
  if (seq.rank() != 2 || seq.cols() != layer.in_dim()) {
    throw ShapeError("lstm_forward: sequence must be T x " +
                     std::to_string(layer.in_dim()));
  }
  const std::size_t cells = layer.cells();
  if (h0.size() != cells || c0.size() != cells) {
    throw ShapeError("lstm_forward: initial state dim must equal cells (" +
                     std::to_string(cells) + ")");
  }
  const std::size_t t_len = seq.rows();
  const auto nc = static_cast<Eigen::Index>(cells);

  const auto& wx = layer.w_input.value.matrix();
  const auto& wh = layer.w_recur.value.matrix();
  const auto bias = layer.bias.value.vector();

  Eigen::VectorXd h = h0.vector();
  Eigen::VectorXd c = c0.vector();
  Tensor hidden({t_len, cells});
  Tensor cell({t_len, cells});

  for (std::size_t t = 0; t < t_len; ++t) {
    Eigen::VectorXd x = seq.matrix().row(static_cast<Eigen::Index>(t));
    Eigen::VectorXd z = wx * x + wh * h + bias;
    auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
    for (Eigen::Index j = 0; j < nc; ++j) {
      const double gi = sig(z(j));
      const double gf = sig(z(nc + j));
      const double gg = std::tanh(z(2 * nc + j));
      const double go = sig(z(3 * nc + j));
      c(j) = gf * c(j) + gi * gg;
      h(j) = go * std::tanh(c(j));
      if (!std::isfinite(h(j)) || !std::isfinite(c(j))) {
        throw NumericError("lstm_forward: non-finite state at timestep " +
                           std::to_string(t + 1));
      }
      hidden.at(t, static_cast<std::size_t>(j)) = h(j);
      cell.at(t, static_cast<std::size_t>(j)) = c(j);
    }
  }
  return {std::move(hidden), std::move(cell)};
}

void lstm_backward_batch(LstmLayer& layer, const BatchSeq& input,
                         const LstmCache& cache, const BatchSeq& d_hidden,
                         BatchSeq* d_input) {
  const std::size_t n = input.n;
  const std::size_t t_len = input.t_len;
  const auto cells = static_cast<Eigen::Index>(layer.cells());

  if (d_input) *d_input = BatchSeq(n, t_len, input.dim());

  Eigen::MatrixXd dh_next = Eigen::MatrixXd::Zero(n, cells);
  Eigen::MatrixXd dc_next = Eigen::MatrixXd::Zero(n, cells);
  Eigen::MatrixXd d_gates(n, 4 * cells);

  auto dwx = layer.w_input.grad.matrix();
  auto dwh = layer.w_recur.grad.matrix();
  auto db = layer.bias.grad.vector();
  const auto& wx = layer.w_input.value.matrix();
  const auto& wh = layer.w_recur.value.matrix();

  for (std::size_t ti = t_len; ti-- > 0;) {
    const auto& gi = cache.gate_i[ti];
    const auto& gf = cache.gate_f[ti];
    const auto& gg = cache.gate_g[ti];
    const auto& go = cache.gate_o[ti];
    const auto c_t = cache.cell.block(ti);

    Eigen::ArrayXXd tanh_c = c_t.array().tanh();
    Eigen::ArrayXXd dh = d_hidden.block(ti).array() + dh_next.array();
    Eigen::ArrayXXd dc =
        dh * go.array() * (1.0 - tanh_c.square()) + dc_next.array();

    Eigen::ArrayXXd c_prev;
    if (ti == 0) {
      c_prev = Eigen::ArrayXXd::Zero(n, cells);
    } else {
      c_prev = cache.cell.block(ti - 1).array();
    }

    // Pre-activation gate gradients.
    d_gates.leftCols(cells) =
        (dc * gg.array() * gi.array() * (1.0 - gi.array())).matrix();
    d_gates.middleCols(cells, cells) =
        (dc * c_prev * gf.array() * (1.0 - gf.array())).matrix();
    d_gates.middleCols(2 * cells, cells) =
        (dc * gi.array() * (1.0 - gg.array().square())).matrix();
    d_gates.rightCols(cells) =
        (dh * tanh_c * go.array() * (1.0 - go.array())).matrix();

    dwx.noalias() += d_gates.transpose() * input.block(ti);
    if (ti > 0) {
      dwh.noalias() += d_gates.transpose() * cache.hidden.block(ti - 1);
      dh_next.noalias() = d_gates * wh;
    } else {
      dh_next.setZero();
    }
    db += d_gates.colwise().sum().transpose();

    if (d_input) d_input->block(ti).noalias() = d_gates * wx;
    dc_next = (dc * gf.array()).matrix();
  }
}

namespace {

void fill_uniform(Tensor& t, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& v : t.values()) v = dist(rng);
}

}  // namespace

void init_dense(DenseLayer& layer, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in_dim()));
  fill_uniform(layer.weights.value, bound, rng);
  layer.bias.value.set_zero();
}

void init_lstm(LstmLayer& layer, std::mt19937_64& rng) {
  fill_uniform(layer.w_input.value,
               1.0 / std::sqrt(static_cast<double>(layer.in_dim())), rng);
  fill_uniform(layer.w_recur.value,
               1.0 / std::sqrt(static_cast<double>(layer.cells())), rng);
  layer.bias.value.set_zero();
}

}  // namespace ibsplit::nn
