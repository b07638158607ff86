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

#include "ibsplit/cascade/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "ibsplit/common/error.hpp"
#include "ibsplit/mi/gcmi.hpp"
#include "ibsplit/mi/kde.hpp"
#include "ibsplit/nn/checkpoint.hpp"

namespace ibsplit::cascade {

namespace {

// Distinct deterministic RNG streams per pipeline stage so every spec-level
// operation is reproducible on its own.
constexpr std::uint64_t kShuffleSalt = 0x9E3779B97F4A7C15ull;

std::mt19937_64 init_rng(std::uint64_t seed) { return std::mt19937_64(seed); }
std::mt19937_64 shuffle_rng_phase1(std::uint64_t seed) {
  return std::mt19937_64(seed ^ kShuffleSalt);
}
std::mt19937_64 augment_rng(std::uint64_t seed) {
  return std::mt19937_64(seed + 1);
}
std::mt19937_64 shuffle_rng_phase2(std::uint64_t seed) {
  return std::mt19937_64((seed + 1) ^ kShuffleSalt);
}
std::mt19937_64 probe_rng(std::uint64_t seed) {
  return std::mt19937_64(seed + 2);
}

// Runs the first `n_layers` encoder layers; returns the top layer's hidden
// sequence. Optionally fills caches (size n_layers).
nn::BatchSeq run_encoder(const std::vector<nn::LstmLayer>& encoder,
                         std::size_t n_layers, const nn::BatchSeq& x,
                         std::vector<nn::LstmCache>* caches) {
  if (caches) caches->assign(n_layers, {});
  nn::BatchSeq current = x;
  for (std::size_t l = 0; l < n_layers; ++l) {
    if (caches) {
      nn::lstm_forward_batch(encoder[l], current, &(*caches)[l]);
      current = (*caches)[l].hidden;
    } else {
      current = nn::lstm_forward_batch(encoder[l], current);
    }
  }
  return current;
}

nn::BatchSeq repeat_latent(const Eigen::MatrixXd& latent, std::size_t t_len) {
  nn::BatchSeq dec(static_cast<std::size_t>(latent.rows()), t_len,
                   static_cast<std::size_t>(latent.cols()));
  for (std::size_t t = 0; t < t_len; ++t) dec.block(t) = latent;
  return dec;
}

Eigen::MatrixXd dense_stack_forward(const std::vector<nn::DenseLayer>& stack,
                                    const Eigen::MatrixXd& input,
                                    std::vector<nn::DenseCache>* caches) {
  if (caches) caches->assign(stack.size(), {});
  Eigen::MatrixXd h = input;
  for (std::size_t l = 0; l < stack.size(); ++l) {
    h = nn::dense_forward(stack[l], h, caches ? &(*caches)[l] : nullptr);
  }
  return h;
}

void freeze_all(std::vector<nn::Parameter*> params) {
  for (nn::Parameter* p : params) p->frozen = true;
}

}  // namespace

Mode mode_from_name(const std::string& name) {
  if (name == "informative") return Mode::kInformative;
  if (name == "compressed") return Mode::kCompressed;
  throw ConfigError("unknown mode '" + name +
                    "' (expected informative or compressed)");
}

std::string mode_name(Mode mode) {
  return mode == Mode::kInformative ? "informative" : "compressed";
}

void CascadeConfig::validate() const {
  if (phase1_cells.empty()) {
    throw ConfigError("cascade needs at least one phase-1 encoder layer");
  }
  for (std::size_t c : phase1_cells) {
    if (c < 1) throw ConfigError("encoder layer sizes must be >= 1");
  }
  if (bottleneck_cells < 1) {
    throw ConfigError("bottleneck size must be >= 1");
  }
  if (bottleneck_cells >= phase1_cells.back()) {
    throw ConfigError(
        "bottleneck size must be smaller than the last phase-1 layer (" +
        std::to_string(bottleneck_cells) + " vs " +
        std::to_string(phase1_cells.back()) + ")");
  }
  if (epochs_phase1 < 1) {
    throw ConfigError("epochs must be >= 1, got " +
                      std::to_string(epochs_phase1));
  }
  if (lr <= 0.0) throw ConfigError("learning rate must be > 0");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (probe_size < 2) throw ConfigError("probe size must be >= 2");
  nn::optimizer_kind_from_name(optimizer);  // throws on unknown names
}

nlohmann::json CascadeConfig::to_json() const {
  nlohmann::json j;
  j["phase1_cells"] = phase1_cells;
  j["bottleneck_cells"] = bottleneck_cells;
  j["decoder_hidden"] = decoder_hidden;
  j["epochs_phase1"] = epochs_phase1;
  j["epochs_phase2"] = epochs_phase2;
  j["lr"] = lr;
  j["batch_size"] = batch_size;
  j["seed"] = seed;
  j["optimizer"] = optimizer;
  j["probe_size"] = probe_size;
  return j;
}

CascadeConfig CascadeConfig::from_json(const nlohmann::json& j) {
  CascadeConfig cfg;
  if (j.contains("phase1_cells")) {
    cfg.phase1_cells = j.at("phase1_cells").get<std::vector<std::size_t>>();
  }
  if (j.contains("bottleneck_cells")) {
    cfg.bottleneck_cells = j.at("bottleneck_cells").get<std::size_t>();
  }
  if (j.contains("decoder_hidden")) {
    cfg.decoder_hidden = j.at("decoder_hidden").get<std::vector<std::size_t>>();
  }
  if (j.contains("epochs_phase1")) {
    cfg.epochs_phase1 = j.at("epochs_phase1").get<std::size_t>();
  }
  if (j.contains("epochs_phase2")) {
    cfg.epochs_phase2 = j.at("epochs_phase2").get<std::size_t>();
  }
  if (j.contains("lr")) cfg.lr = j.at("lr").get<double>();
  if (j.contains("batch_size")) {
    cfg.batch_size = j.at("batch_size").get<std::size_t>();
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("optimizer")) {
    cfg.optimizer = j.at("optimizer").get<std::string>();
  }
  if (j.contains("probe_size")) {
    cfg.probe_size = j.at("probe_size").get<std::size_t>();
  }
  cfg.validate();
  return cfg;
}

std::size_t CascadeModel::informative_dim() const {
  if (phase1_layers == 0) throw ConfigError("model has no phase-1 layers");
  return encoder[phase1_layers - 1].cells();
}

std::size_t CascadeModel::compressed_dim() const {
  if (!has_bottleneck) {
    throw ConfigError("model has no bottleneck layer yet (run augment)");
  }
  return encoder.back().cells();
}

std::size_t CascadeModel::latent_dim(Mode mode) const {
  return mode == Mode::kInformative ? informative_dim() : compressed_dim();
}

std::vector<nn::Parameter*> CascadeModel::phase1_parameters() {
  std::vector<nn::Parameter*> out;
  for (std::size_t l = 0; l < phase1_layers; ++l) {
    out.push_back(&encoder[l].w_input);
    out.push_back(&encoder[l].w_recur);
    out.push_back(&encoder[l].bias);
  }
  for (auto& layer : head) {
    out.push_back(&layer.weights);
    out.push_back(&layer.bias);
  }
  return out;
}

std::vector<const nn::Parameter*> CascadeModel::phase1_parameters() const {
  std::vector<const nn::Parameter*> out;
  for (std::size_t l = 0; l < phase1_layers; ++l) {
    out.push_back(&encoder[l].w_input);
    out.push_back(&encoder[l].w_recur);
    out.push_back(&encoder[l].bias);
  }
  for (const auto& layer : head) {
    out.push_back(&layer.weights);
    out.push_back(&layer.bias);
  }
  return out;
}

std::vector<nn::Parameter*> CascadeModel::phase2_parameters() {
  if (!has_bottleneck) {
    throw ConfigError("phase-2 parameters requested before augment");
  }
  nn::LstmLayer& a = encoder.back();
  return {&a.w_input, &a.w_recur, &a.bias, &entry_b.weights, &entry_b.bias};
}

Eigen::MatrixXd encode_latent(const CascadeModel& model, const nn::BatchSeq& x,
                              Mode mode) {
  const std::size_t layers = mode == Mode::kInformative
                                 ? model.phase1_layers
                                 : model.encoder.size();
  if (mode == Mode::kCompressed && !model.has_bottleneck) {
    throw ConfigError("compressed mode requires the bottleneck layer");
  }
  const nn::BatchSeq top = run_encoder(model.encoder, layers, x, nullptr);
  return top.block(top.t_len - 1);
}

Eigen::MatrixXd decode_from_latent(const CascadeModel& model,
                                   const Eigen::MatrixXd& latent, Mode mode,
                                   std::size_t t_len) {
  if (static_cast<std::size_t>(latent.cols()) != model.latent_dim(mode)) {
    throw ShapeError("latent has dim " + std::to_string(latent.cols()) +
                     ", mode " + mode_name(mode) + " expects " +
                     std::to_string(model.latent_dim(mode)));
  }
  nn::BatchSeq dec = repeat_latent(latent, t_len);
  Eigen::MatrixXd h = dec.values;
  if (mode == Mode::kCompressed) {
    h = nn::dense_forward(model.entry_b, h, nullptr);
  }
  return dense_stack_forward(model.head, h, nullptr);
}

Eigen::MatrixXd infer_batch(const CascadeModel& model, const nn::BatchSeq& x,
                            Mode mode) {
  return decode_from_latent(model, encode_latent(model, x, mode), mode,
                            x.t_len);
}

Eigen::MatrixXd infer(const CascadeModel& model, const Eigen::MatrixXd& window,
                      Mode mode) {
  if (static_cast<std::size_t>(window.rows()) != model.seq_len ||
      static_cast<std::size_t>(window.cols()) != model.input_dim) {
    throw ShapeError("window is " + std::to_string(window.rows()) + "x" +
                     std::to_string(window.cols()) + ", model expects " +
                     std::to_string(model.seq_len) + "x" +
                     std::to_string(model.input_dim));
  }
  nn::BatchSeq x(1, model.seq_len, model.input_dim);
  for (std::size_t t = 0; t < model.seq_len; ++t) {
    x.block(t) = window.row(static_cast<Eigen::Index>(t));
  }
  return infer_batch(model, x, mode);  // (T*1) x K == T x K
}

nn::LossStats evaluate(const CascadeModel& model, const nn::Batch& batch,
                       Mode mode) {
  return nn::cross_entropy(infer_batch(model, batch.x, mode), batch.y);
}

CascadeTrainer::CascadeTrainer(const data::Dataset& train, CascadeConfig cfg)
    : train_(train), cfg_(std::move(cfg)) {
  cfg_.validate();
  if (train_.windows.empty()) throw DataError("training dataset is empty");
  if (train_.n_classes < 2) {
    throw DataError("training dataset needs >= 2 classes");
  }

  std::mt19937_64 rng = init_rng(cfg_.seed);
  model_.input_dim = train_.n_features;
  model_.seq_len = train_.t_len;
  model_.n_classes = train_.n_classes;
  model_.phase1_layers = cfg_.phase1_cells.size();

  std::size_t in = train_.n_features;
  for (std::size_t cells : cfg_.phase1_cells) {
    nn::LstmLayer layer(in, cells);
    nn::init_lstm(layer, rng);
    model_.encoder.push_back(std::move(layer));
    in = cells;
  }
  for (std::size_t width : cfg_.decoder_hidden) {
    nn::DenseLayer layer(in, width, nn::Activation::kTanh);
    nn::init_dense(layer, rng);
    model_.head.push_back(std::move(layer));
    in = width;
  }
  nn::DenseLayer readout(in, train_.n_classes, nn::Activation::kSoftmax);
  nn::init_dense(readout, rng);
  model_.head.push_back(std::move(readout));

  // Fixed probe sample for activation recording, shared across both phases.
  std::vector<std::size_t> all(train_.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const std::size_t probe_n = std::min(cfg_.probe_size, train_.size());
  std::mt19937_64 prng = probe_rng(cfg_.seed);
  probe_indices_.resize(probe_n);
  std::sample(all.begin(), all.end(), probe_indices_.begin(),
              static_cast<long>(probe_n), prng);
  probe_ = data::make_batch(train_, probe_indices_);
}

void CascadeTrainer::record_epoch(int phase, std::size_t epoch) {
  auto recs = nn::record_activations(model_.encoder, probe_.x, epoch, phase);
  records_.insert(records_.end(), std::make_move_iterator(recs.begin()),
                  std::make_move_iterator(recs.end()));
}

void CascadeTrainer::run_epochs(int phase, std::size_t epochs,
                                const std::vector<nn::Parameter*>& params,
                                std::mt19937_64& shuffle_rng) {
  nn::OptimizerConfig opt_cfg;
  opt_cfg.kind = nn::optimizer_kind_from_name(cfg_.optimizer);
  opt_cfg.lr = cfg_.lr;
  nn::Optimizer optimizer(opt_cfg);

  std::vector<std::size_t> order(train_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<double>& loss_hist =
      phase == 1 ? model_.history.loss_phase1 : model_.history.loss_phase2;
  std::vector<double>& acc_hist =
      phase == 1 ? model_.history.acc_phase1 : model_.history.acc_phase2;

  record_epoch(phase, 0);

  for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    double acc_sum = 0.0;
    std::size_t seen = 0;

    for (std::size_t start = 0; start < order.size();
         start += cfg_.batch_size) {
      const std::size_t count =
          std::min(cfg_.batch_size, order.size() - start);
      std::vector<std::size_t> idx(order.begin() + static_cast<long>(start),
                                   order.begin() +
                                       static_cast<long>(start + count));
      nn::LossStats stats;
      if (phase == 1) {
        stats = phase1_step(idx);
      } else {
        stats = phase2_step(idx);
      }
      if (!std::isfinite(stats.loss)) {
        throw NumericError("phase " + std::to_string(phase) +
                           " diverged at epoch " + std::to_string(epoch));
      }
      optimizer.step(params);
      loss_sum += stats.loss * static_cast<double>(count);
      acc_sum += stats.accuracy * static_cast<double>(count);
      seen += count;
    }
    loss_hist.push_back(loss_sum / static_cast<double>(seen));
    acc_hist.push_back(acc_sum / static_cast<double>(seen));
    record_epoch(phase, epoch);
  }
}

nn::LossStats CascadeTrainer::phase1_step(
    const std::vector<std::size_t>& idx) {
  for (nn::Parameter* p : model_.phase1_parameters()) p->zero_grad();
  const nn::Batch batch = data::make_batch(train_, idx);

  std::vector<nn::LstmCache> lstm_caches;
  const nn::BatchSeq top = run_encoder(model_.encoder, model_.phase1_layers,
                                       batch.x, &lstm_caches);
  const Eigen::MatrixXd latent = top.block(top.t_len - 1);
  const nn::BatchSeq dec = repeat_latent(latent, batch.x.t_len);
  std::vector<nn::DenseCache> head_caches;
  const Eigen::MatrixXd probs =
      dense_stack_forward(model_.head, dec.values, &head_caches);

  const nn::LossStats stats = nn::cross_entropy(probs, batch.y);
  const Eigen::MatrixXd d_logits = nn::cross_entropy_grad(probs, batch.y);
  const Eigen::MatrixXd d_dec =
      nn::dense_stack_backward(model_.head, head_caches, d_logits);
  const Eigen::MatrixXd d_latent =
      nn::sum_over_timesteps(d_dec, batch.x.n, batch.x.t_len);

  nn::encoder_backward(model_.encoder, batch.x, lstm_caches, d_latent);
  return stats;
}

nn::LossStats CascadeTrainer::phase2_step(
    const std::vector<std::size_t>& idx) {
  for (nn::Parameter* p : model_.phase2_parameters()) p->zero_grad();

  const std::size_t n = idx.size();
  const std::size_t t_len = train_.t_len;
  const std::size_t c = model_.informative_dim();

  nn::BatchSeq frozen(n, t_len, c);
  std::vector<int> y(t_len * n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::MatrixXd& cached = frozen_cache_[idx[i]];
    const auto& targets = train_.windows[idx[i]].targets;
    for (std::size_t t = 0; t < t_len; ++t) {
      frozen.values.row(static_cast<Eigen::Index>(t * n + i)) =
          cached.row(static_cast<Eigen::Index>(t));
      y[t * n + i] = targets[t];
    }
  }

  nn::LstmCache cache_a;
  nn::lstm_forward_batch(model_.encoder.back(), frozen, &cache_a);
  const Eigen::MatrixXd latent = cache_a.hidden.block(t_len - 1);
  const nn::BatchSeq dec = repeat_latent(latent, t_len);
  nn::DenseCache cache_b;
  const Eigen::MatrixXd b_out =
      nn::dense_forward(model_.entry_b, dec.values, &cache_b);
  std::vector<nn::DenseCache> head_caches;
  const Eigen::MatrixXd probs =
      dense_stack_forward(model_.head, b_out, &head_caches);

  const nn::LossStats stats = nn::cross_entropy(probs, y);
  const Eigen::MatrixXd d_logits = nn::cross_entropy_grad(probs, y);
  const Eigen::MatrixXd d_b_out =
      nn::dense_stack_backward(model_.head, head_caches, d_logits);
  const Eigen::MatrixXd d_dec =
      nn::dense_backward(model_.entry_b, cache_b, d_b_out);
  const Eigen::MatrixXd d_latent = nn::sum_over_timesteps(d_dec, n, t_len);

  nn::BatchSeq d_hidden(n, t_len, model_.compressed_dim());
  d_hidden.block(t_len - 1) = d_latent;
  nn::lstm_backward_batch(model_.encoder.back(), frozen, cache_a, d_hidden,
                          nullptr);
  return stats;
}

void CascadeTrainer::train_phase1() {
  if (!model_.history.loss_phase1.empty()) {
    throw ConfigError("phase 1 already trained");
  }
  std::mt19937_64 rng = shuffle_rng_phase1(cfg_.seed);
  run_epochs(1, cfg_.epochs_phase1, model_.phase1_parameters(), rng);
}

void CascadeTrainer::augment() { cascade::augment(model_, cfg_); }

void CascadeTrainer::train_phase2() {
  if (!model_.has_bottleneck) {
    throw ConfigError("augment must run before phase 2");
  }
  // Cache the frozen encoder's hidden sequence for every training window.
  frozen_cache_.resize(train_.size());
  const std::size_t chunk = 512;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < train_.size(); start += chunk) {
    const std::size_t count = std::min(chunk, train_.size() - start);
    idx.resize(count);
    std::iota(idx.begin(), idx.end(), start);
    const nn::Batch batch = data::make_batch(train_, idx);
    const nn::BatchSeq top = run_encoder(
        model_.encoder, model_.phase1_layers, batch.x, nullptr);
    for (std::size_t i = 0; i < count; ++i) {
      Eigen::MatrixXd per_window(static_cast<Eigen::Index>(train_.t_len),
                                 top.values.cols());
      for (std::size_t t = 0; t < train_.t_len; ++t) {
        per_window.row(static_cast<Eigen::Index>(t)) =
            top.values.row(static_cast<Eigen::Index>(t * count + i));
      }
      frozen_cache_[start + i] = std::move(per_window);
    }
  }

  std::mt19937_64 rng = shuffle_rng_phase2(cfg_.seed);
  run_epochs(2, cfg_.effective_phase2_epochs(), model_.phase2_parameters(),
             rng);
  frozen_cache_.clear();
  frozen_cache_.shrink_to_fit();
}

CascadeModel train_phase1(const data::Dataset& train,
                          const CascadeConfig& cfg) {
  CascadeTrainer trainer(train, cfg);
  trainer.train_phase1();
  return trainer.take_model();
}

void augment(CascadeModel& model, const CascadeConfig& cfg) {
  if (model.has_bottleneck) {
    throw ConfigError("model already has a bottleneck layer");
  }
  if (model.history.loss_phase1.empty()) {
    throw ConfigError("augment requires a trained phase-1 model");
  }
  if (cfg.bottleneck_cells >= model.informative_dim()) {
    throw ConfigError("bottleneck size must be smaller than the phase-1 "
                      "latent dimension");
  }
  freeze_all(model.phase1_parameters());

  std::mt19937_64 rng = augment_rng(cfg.seed);
  nn::LstmLayer layer_a(model.informative_dim(), cfg.bottleneck_cells);
  nn::init_lstm(layer_a, rng);

  const std::size_t head_in =
      model.head.front().in_dim();
  nn::DenseLayer layer_b(cfg.bottleneck_cells, head_in,
                         nn::Activation::kTanh);
  nn::init_dense(layer_b, rng);
  if (layer_a.cells() != layer_b.in_dim()) {
    throw ConfigError("layer A output dim " + std::to_string(layer_a.cells()) +
                      " does not match layer B input dim " +
                      std::to_string(layer_b.in_dim()));
  }

  model.encoder.push_back(std::move(layer_a));
  model.entry_b = std::move(layer_b);
  model.has_bottleneck = true;
}

void train_phase2(CascadeModel& model, const data::Dataset& train,
                  const CascadeConfig& cfg) {
  CascadeTrainer trainer(train, cfg);
  trainer.model() = std::move(model);
  trainer.train_phase2();
  model = trainer.take_model();
}

nlohmann::json OrderingReport::to_json() const {
  auto mode_json = [](const ModeReport& m) {
    nlohmann::json j;
    j["mode"] = mode_name(m.mode);
    j["accuracy"] = m.accuracy;
    j["i_xz_bits"] = m.i_xz_bits;
    j["i_y_out_bits"] = m.i_y_out_bits;
    return j;
  };
  nlohmann::json j;
  j["modes"] = nlohmann::json::array({mode_json(informative),
                                      mode_json(compressed)});
  j["slack"] = {{"accuracy", accuracy_slack}, {"bits", bits_slack}};
  // Both ordering directions are reported explicitly.
  j["orderings"] = {
      {"compressed_accuracy_le_informative", accuracy_ordered},
      {"informative_accuracy_le_compressed",
       informative.accuracy <= compressed.accuracy + accuracy_slack},
      {"i_x_compressed_le_informative", i_xz_ordered},
  };
  j["pass"] = pass;
  return j;
}

OrderingReport verify_ordering(const CascadeModel& model,
                               const data::Dataset& val,
                               const OrderingConfig& cfg) {
  if (val.windows.empty()) throw DataError("validation dataset is empty");
  if (!model.has_bottleneck) {
    throw ConfigError("verify_ordering requires both phases trained");
  }

  std::vector<std::size_t> idx(val.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const nn::Batch batch = data::make_batch(val, idx);
  const std::size_t n = val.size();
  const std::size_t t_len = val.t_len;

  // Flattened input windows and final-timestep labels.
  mi::SampleMatrix x_flat(static_cast<Eigen::Index>(n),
                          static_cast<Eigen::Index>(t_len * val.n_features));
  std::vector<int> y_final(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& win = val.windows[i];
    for (std::size_t t = 0; t < t_len; ++t) {
      x_flat.block(static_cast<Eigen::Index>(i),
                   static_cast<Eigen::Index>(t * val.n_features), 1,
                   static_cast<Eigen::Index>(val.n_features)) =
          win.inputs.row(static_cast<Eigen::Index>(t));
    }
    y_final[i] = win.targets[t_len - 1];
  }

  OrderingReport report;
  report.accuracy_slack = cfg.accuracy_slack;
  report.bits_slack = cfg.bits_slack;

  for (const Mode mode : {Mode::kInformative, Mode::kCompressed}) {
    ModeReport& mr =
        mode == Mode::kInformative ? report.informative : report.compressed;
    mr.mode = mode;

    const Eigen::MatrixXd latent = encode_latent(model, batch.x, mode);
    const Eigen::MatrixXd probs =
        decode_from_latent(model, latent, mode, t_len);
    mr.accuracy = nn::cross_entropy(probs, batch.y).accuracy;
    mr.i_xz_bits = mi::gcmi(x_flat, latent).bits;

    // Decoder output representation: final-timestep probability rows.
    Eigen::MatrixXd out_final(static_cast<Eigen::Index>(n), probs.cols());
    for (std::size_t i = 0; i < n; ++i) {
      out_final.row(static_cast<Eigen::Index>(i)) =
          probs.row(static_cast<Eigen::Index>((t_len - 1) * n + i));
    }
    mr.i_y_out_bits = mi::kde_mi_label(y_final, out_final).bits;
  }

  report.accuracy_ordered = report.compressed.accuracy <=
                            report.informative.accuracy + cfg.accuracy_slack;
  report.i_xz_ordered =
      report.compressed.i_xz_bits <=
      report.informative.i_xz_bits + cfg.bits_slack;
  const bool gap_ok =
      report.informative.accuracy - report.compressed.accuracy >=
      cfg.min_accuracy_gap;
  report.pass = report.accuracy_ordered && report.i_xz_ordered && gap_ok;
  return report;
}

void save_cascade(const CascadeModel& model,
                  const std::filesystem::path& path) {
  nlohmann::json j;
  j["input_dim"] = model.input_dim;
  j["seq_len"] = model.seq_len;
  j["n_classes"] = model.n_classes;
  j["phase1_layers"] = model.phase1_layers;
  j["encoder"] = nlohmann::json::array();
  for (const auto& l : model.encoder) j["encoder"].push_back(nn::lstm_to_json(l));
  j["head"] = nlohmann::json::array();
  for (const auto& l : model.head) j["head"].push_back(nn::dense_to_json(l));
  j["has_bottleneck"] = model.has_bottleneck;
  if (model.has_bottleneck) j["entry_b"] = nn::dense_to_json(model.entry_b);
  j["history"] = {{"loss_phase1", model.history.loss_phase1},
                  {"acc_phase1", model.history.acc_phase1},
                  {"loss_phase2", model.history.loss_phase2},
                  {"acc_phase2", model.history.acc_phase2}};
  nn::save_checkpoint(j, "cascade_model", path);
}

CascadeModel load_cascade(const std::filesystem::path& path) {
  const nlohmann::json j = nn::load_checkpoint(path, "cascade_model");
  CascadeModel model;
  model.input_dim = j.at("input_dim").get<std::size_t>();
  model.seq_len = j.at("seq_len").get<std::size_t>();
  model.n_classes = j.at("n_classes").get<std::size_t>();
  model.phase1_layers = j.at("phase1_layers").get<std::size_t>();
  for (const auto& lj : j.at("encoder")) {
    model.encoder.push_back(nn::lstm_from_json(lj));
  }
  for (const auto& lj : j.at("head")) {
    model.head.push_back(nn::dense_from_json(lj));
  }
  model.has_bottleneck = j.at("has_bottleneck").get<bool>();
  if (model.has_bottleneck) {
    model.entry_b = nn::dense_from_json(j.at("entry_b"));
  }
  const auto& h = j.at("history");
  model.history.loss_phase1 = h.at("loss_phase1").get<std::vector<double>>();
  model.history.acc_phase1 = h.at("acc_phase1").get<std::vector<double>>();
  model.history.loss_phase2 = h.at("loss_phase2").get<std::vector<double>>();
  model.history.acc_phase2 = h.at("acc_phase2").get<std::vector<double>>();
  if (model.encoder.size() !=
      model.phase1_layers + (model.has_bottleneck ? 1 : 0)) {
    throw IoError("cascade checkpoint encoder layer count mismatch");
  }
  return model;
}

}  // namespace ibsplit::cascade
