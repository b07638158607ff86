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

#ifndef IBSPLIT_CASCADE_CASCADE_HPP_
#define IBSPLIT_CASCADE_CASCADE_HPP_

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ibsplit/data/dataset.hpp"
#include "ibsplit/nn/layers.hpp"
#include "ibsplit/nn/network.hpp"
#include "ibsplit/nn/optimizer.hpp"

namespace ibsplit::cascade {

/// Which latent code the decoder consumes: the Informative code z (final
/// hidden state of the last phase-1 layer) or the Compressed code z' (final
/// hidden state of the added bottleneck layer).
enum class Mode { kInformative, kCompressed };

Mode mode_from_name(const std::string& name);
std::string mode_name(Mode mode);

struct CascadeConfig {
  std::vector<std::size_t> phase1_cells = {128, 128};
  std::size_t bottleneck_cells = 32;
  std::vector<std::size_t> decoder_hidden = {};  // between latent and softmax
  std::size_t epochs_phase1 = 10;
  std::size_t epochs_phase2 = 0;  // 0: same as phase 1
  double lr = 1e-2;
  std::size_t batch_size = 256;
  std::uint64_t seed = 1;
  std::string optimizer = "adam";
  std::size_t probe_size = 384;  // windows recorded for analysis

  std::size_t effective_phase2_epochs() const {
    return epochs_phase2 > 0 ? epochs_phase2 : epochs_phase1;
  }
  void validate() const;

  nlohmann::json to_json() const;
  static CascadeConfig from_json(const nlohmann::json& j);
};

struct TrainHistory {
  std::vector<double> loss_phase1, acc_phase1;
  std::vector<double> loss_phase2, acc_phase2;
};

/// The dual-mode model: encoder layers 1..L (phase 1, frozen after phase 1)
/// plus bottleneck layer A (= encoder layer L+1); a shared decoder head; and
/// the bottleneck-path entry layer B. The Informative path skips B.
struct CascadeModel {
  std::size_t input_dim = 0;
  std::size_t seq_len = 0;
  std::size_t n_classes = 0;
  std::size_t phase1_layers = 0;

  std::vector<nn::LstmLayer> encoder;  // size phase1_layers (+1 after augment)
  std::vector<nn::DenseLayer> head;    // shared decoder stack, softmax last
  bool has_bottleneck = false;
  nn::DenseLayer entry_b;  // bottleneck-path entry (tanh)

  TrainHistory history;

  std::size_t informative_dim() const;
  std::size_t compressed_dim() const;
  std::size_t latent_dim(Mode mode) const;

  std::vector<nn::Parameter*> phase1_parameters();
  std::vector<const nn::Parameter*> phase1_parameters() const;
  std::vector<nn::Parameter*> phase2_parameters();  // layer A + entry B
};

/// Runs the encoder through layer L (Informative) or L+1 (Compressed) and
/// returns the final-timestep hidden state, n x latent_dim(mode).
Eigen::MatrixXd encode_latent(const CascadeModel& model,
                              const nn::BatchSeq& x, Mode mode);

/// Decodes a latent batch into per-timestep class probabilities,
/// (t_len*n) x K in time-major row order.
Eigen::MatrixXd decode_from_latent(const CascadeModel& model,
                                   const Eigen::MatrixXd& latent, Mode mode,
                                   std::size_t t_len);

Eigen::MatrixXd infer_batch(const CascadeModel& model, const nn::BatchSeq& x,
                            Mode mode);

/// Spec-level single-window inference: T x K probability rows.
Eigen::MatrixXd infer(const CascadeModel& model, const Eigen::MatrixXd& window,
                      Mode mode);

nn::LossStats evaluate(const CascadeModel& model, const nn::Batch& batch,
                       Mode mode);

/// Orchestrates both phases with per-op deterministic RNG streams and a
/// fixed recorded probe. The spec-level free functions below wrap it.
class CascadeTrainer {
 public:
  CascadeTrainer(const data::Dataset& train, CascadeConfig cfg);

  void train_phase1();
  void augment();
  void train_phase2();

  const CascadeModel& model() const { return model_; }
  CascadeModel& model() { return model_; }
  CascadeModel take_model() { return std::move(model_); }

  const std::vector<nn::LayerActivations>& records() const { return records_; }
  std::vector<nn::LayerActivations> take_records() {
    return std::move(records_);
  }
  const nn::Batch& probe() const { return probe_; }
  const std::vector<std::size_t>& probe_indices() const {
    return probe_indices_;
  }

 private:
  void record_epoch(int phase, std::size_t epoch);
  void run_epochs(int phase, std::size_t epochs,
                  const std::vector<nn::Parameter*>& params,
                  std::mt19937_64& shuffle_rng);
  nn::LossStats phase1_step(const std::vector<std::size_t>& idx);
  nn::LossStats phase2_step(const std::vector<std::size_t>& idx);

  const data::Dataset& train_;
  CascadeConfig cfg_;
  CascadeModel model_;
  std::vector<nn::LayerActivations> records_;
  std::vector<std::size_t> probe_indices_;
  nn::Batch probe_;
  std::vector<Eigen::MatrixXd> frozen_cache_;  // per window: t_len x L-cells
};

/// Algorithm 1 line 1: train [Encoder1, Decoder1].
CascadeModel train_phase1(const data::Dataset& train,
                          const CascadeConfig& cfg);

/// Algorithm 1 lines 2-5: freeze phase-1 parameters, append bottleneck layer
/// A and decoder entry layer B (dimensions must agree).
void augment(CascadeModel& model, const CascadeConfig& cfg);

/// Algorithm 1 line 6: train only A and B; frozen parameters are
/// bit-identical afterwards.
void train_phase2(CascadeModel& model, const data::Dataset& train,
                  const CascadeConfig& cfg);

struct ModeReport {
  Mode mode = Mode::kInformative;
  double accuracy = 0.0;
  double i_xz_bits = 0.0;
  double i_y_out_bits = 0.0;
};

struct OrderingReport {
  ModeReport informative;
  ModeReport compressed;
  double accuracy_slack = 0.02;
  double bits_slack = 0.2;
  bool accuracy_ordered = false;  // compressed <= informative + slack
  bool i_xz_ordered = false;      // I(X;z') <= I(X;z) + slack
  bool pass = false;

  nlohmann::json to_json() const;
};

struct OrderingConfig {
  double accuracy_slack = 0.02;
  double bits_slack = 0.2;
  double min_accuracy_gap = 0.0;  // optional minimum Informative advantage
};

/// Evaluates both modes on validation data and checks the ordering
/// properties. Failure is a reported outcome (pass=false), never a throw.
OrderingReport verify_ordering(const CascadeModel& model,
                               const data::Dataset& val,
                               const OrderingConfig& cfg = {});

void save_cascade(const CascadeModel& model, const std::filesystem::path& path);
CascadeModel load_cascade(const std::filesystem::path& path);

}  // namespace ibsplit::cascade

#endif  // IBSPLIT_CASCADE_CASCADE_HPP_
