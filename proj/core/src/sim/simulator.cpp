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

#include "ibsplit/sim/simulator.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "ibsplit/common/error.hpp"
#include "ibsplit/data/csv.hpp"
#include "ibsplit/sim/wire.hpp"

namespace ibsplit::sim {

void OrchestratorPolicy::validate() const {
  if (accuracy_floor < 0.0 || accuracy_floor > 1.0) {
    throw ConfigError("accuracy floor must be in [0,1]");
  }
  if (hysteresis_steps < 1) throw ConfigError("hysteresis must be >= 1");
  if (feedback_period < 1) throw ConfigError("feedback period must be >= 1");
  if (feedback_window < 1) throw ConfigError("feedback window must be >= 1");
}

nlohmann::json OrchestratorPolicy::to_json() const {
  nlohmann::json j;
  j["accuracy_floor"] = accuracy_floor;
  j["hysteresis_steps"] = hysteresis_steps;
  j["feedback_period"] = feedback_period;
  j["feedback_window"] = feedback_window;
  return j;
}

OrchestratorPolicy OrchestratorPolicy::from_json(const nlohmann::json& j) {
  OrchestratorPolicy p;
  if (j.contains("accuracy_floor")) {
    p.accuracy_floor = j.at("accuracy_floor").get<double>();
  }
  if (j.contains("hysteresis_steps")) {
    p.hysteresis_steps = j.at("hysteresis_steps").get<std::size_t>();
  }
  if (j.contains("feedback_period")) {
    p.feedback_period = j.at("feedback_period").get<std::size_t>();
  }
  if (j.contains("feedback_window")) {
    p.feedback_window = j.at("feedback_window").get<std::size_t>();
  }
  p.validate();
  return p;
}

cascade::Mode policy_decide(const OrchestratorPolicy& policy, LinkState state,
                            double recent_accuracy_compressed,
                            std::size_t steps_since_switch,
                            cascade::Mode current) {
  const bool compressed_ok =
      recent_accuracy_compressed >= policy.accuracy_floor;
  const cascade::Mode desired =
      (state == LinkState::kCongested && compressed_ok)
          ? cascade::Mode::kCompressed
          : cascade::Mode::kInformative;
  if (desired != current && steps_since_switch < policy.hysteresis_steps) {
    return current;  // switch blocked inside the hysteresis window
  }
  return desired;
}

ModeRule mode_rule_from_name(const std::string& name) {
  if (name == "adaptive") return ModeRule::kAdaptive;
  if (name == "informative") return ModeRule::kForcedInformative;
  if (name == "compressed") return ModeRule::kForcedCompressed;
  throw ConfigError("unknown mode rule '" + name +
                    "' (expected adaptive, informative or compressed)");
}

std::string mode_rule_name(ModeRule rule) {
  switch (rule) {
    case ModeRule::kAdaptive:
      return "adaptive";
    case ModeRule::kForcedInformative:
      return "informative";
    case ModeRule::kForcedCompressed:
      return "compressed";
  }
  throw ConfigError("invalid mode rule");
}

void SimConfig::validate() const {
  link.validate();
  policy.validate();
  if (steps < 1) throw ConfigError("simulation needs at least 1 step");
}

nlohmann::json SimConfig::to_json() const {
  nlohmann::json j;
  j["link"] = link.to_json();
  j["policy"] = policy.to_json();
  j["steps"] = steps;
  j["mode_rule"] = mode_rule_name(mode_rule);
  return j;
}

SimConfig SimConfig::from_json(const nlohmann::json& j) {
  SimConfig cfg;
  if (j.contains("link")) cfg.link = LinkModel::from_json(j.at("link"));
  if (j.contains("policy")) {
    cfg.policy = OrchestratorPolicy::from_json(j.at("policy"));
  }
  if (j.contains("steps")) cfg.steps = j.at("steps").get<std::size_t>();
  if (j.contains("mode_rule")) {
    cfg.mode_rule = mode_rule_from_name(j.at("mode_rule").get<std::string>());
  }
  cfg.validate();
  return cfg;
}

bool operator==(const SimAggregates& a, const SimAggregates& b) {
  return a.total_bytes == b.total_bytes && a.mean_latency == b.mean_latency &&
         a.steps_informative == b.steps_informative &&
         a.steps_compressed == b.steps_compressed &&
         a.correct_informative == b.correct_informative &&
         a.timesteps_informative == b.timesteps_informative &&
         a.correct_compressed == b.correct_compressed &&
         a.timesteps_compressed == b.timesteps_compressed &&
         a.accuracy == b.accuracy &&
         a.accuracy_informative == b.accuracy_informative &&
         a.accuracy_compressed == b.accuracy_compressed &&
         a.switch_count == b.switch_count;
}

SimAggregates compute_aggregates(const std::vector<SimStep>& steps) {
  SimAggregates agg;
  double latency_sum = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
  for (const SimStep& s : steps) {
    agg.total_bytes += s.payload_bytes;
    latency_sum += s.latency;
    correct += s.correct_timesteps;
    total += s.total_timesteps;
    if (s.mode == cascade::Mode::kInformative) {
      ++agg.steps_informative;
      agg.correct_informative += s.correct_timesteps;
      agg.timesteps_informative += s.total_timesteps;
    } else {
      ++agg.steps_compressed;
      agg.correct_compressed += s.correct_timesteps;
      agg.timesteps_compressed += s.total_timesteps;
    }
    if (s.switched) ++agg.switch_count;
  }
  if (!steps.empty()) {
    agg.mean_latency = latency_sum / static_cast<double>(steps.size());
  }
  if (total > 0) {
    agg.accuracy = static_cast<double>(correct) / static_cast<double>(total);
  }
  if (agg.timesteps_informative > 0) {
    agg.accuracy_informative =
        static_cast<double>(agg.correct_informative) /
        static_cast<double>(agg.timesteps_informative);
  }
  if (agg.timesteps_compressed > 0) {
    agg.accuracy_compressed = static_cast<double>(agg.correct_compressed) /
                              static_cast<double>(agg.timesteps_compressed);
  }
  return agg;
}

nlohmann::json SimTrace::summary_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["mode_rule"] = mode_rule_name(mode_rule);
  j["steps"] = steps.size();
  j["total_bytes"] = aggregates.total_bytes;
  j["mean_latency"] = aggregates.mean_latency;
  j["accuracy"] = aggregates.accuracy;
  j["steps_informative"] = aggregates.steps_informative;
  j["steps_compressed"] = aggregates.steps_compressed;
  j["accuracy_informative"] = aggregates.accuracy_informative;
  j["accuracy_compressed"] = aggregates.accuracy_compressed;
  j["switch_count"] = aggregates.switch_count;
  return j;
}

namespace {

std::size_t argmax_row(const Eigen::MatrixXd& m, Eigen::Index row) {
  std::size_t best = 0;
  double best_value = m(row, 0);
  for (Eigen::Index c = 1; c < m.cols(); ++c) {
    if (m(row, c) > best_value) {
      best_value = m(row, c);
      best = static_cast<std::size_t>(c);
    }
  }
  return best;
}

// Sliding-window per-mode accuracy feedback delivered in periodic batches.
class FeedbackTracker {
 public:
  explicit FeedbackTracker(const OrchestratorPolicy& policy)
      : policy_(policy) {}

  void observe(cascade::Mode mode, std::size_t correct, std::size_t total) {
    window_.push_back({mode, correct, total});
    if (window_.size() > policy_.feedback_window) window_.pop_front();
  }

  // Recomputes the orchestrator's view; called every feedback_period steps.
  void refresh() {
    std::size_t correct = 0;
    std::size_t total = 0;
    for (const Entry& e : window_) {
      if (e.mode != cascade::Mode::kCompressed) continue;
      correct += e.correct;
      total += e.total;
    }
    // A mode with no recent observations stays optimistically eligible.
    view_compressed_ = total == 0 ? 1.0
                                  : static_cast<double>(correct) /
                                        static_cast<double>(total);
  }

  double view_compressed() const { return view_compressed_; }

 private:
  struct Entry {
    cascade::Mode mode;
    std::size_t correct;
    std::size_t total;
  };
  const OrchestratorPolicy& policy_;
  std::deque<Entry> window_;
  double view_compressed_ = 1.0;
};

}  // namespace

SimTrace run(const cascade::CascadeModel& model, const data::Dataset& stream,
             const SimConfig& cfg) {
  cfg.validate();
  if (stream.windows.empty()) {
    throw DataError("simulation stream is empty");
  }
  if (stream.n_features != model.input_dim || stream.t_len != model.seq_len) {
    throw ShapeError("stream windows are " + std::to_string(stream.t_len) +
                     "x" + std::to_string(stream.n_features) +
                     ", model expects " + std::to_string(model.seq_len) + "x" +
                     std::to_string(model.input_dim));
  }
  const bool needs_compressed = cfg.mode_rule != ModeRule::kForcedInformative;
  if (needs_compressed && !model.has_bottleneck) {
    throw ConfigError("compressed mode requires a model with a bottleneck");
  }

  // UE-side encoding is precomputed in one batched pass per mode; the
  // per-step loop then serializes, transmits and decodes the chosen code.
  std::vector<std::size_t> all(stream.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const nn::Batch batch = data::make_batch(stream, all);
  const Eigen::MatrixXd latent_info =
      encode_latent(model, batch.x, cascade::Mode::kInformative);
  Eigen::MatrixXd latent_comp;
  if (needs_compressed) {
    latent_comp = encode_latent(model, batch.x, cascade::Mode::kCompressed);
  }

  std::mt19937_64 rng(cfg.link.seed);
  LinkState state = cfg.link.initial;
  cascade::Mode mode = cfg.mode_rule == ModeRule::kForcedCompressed
                           ? cascade::Mode::kCompressed
                           : cascade::Mode::kInformative;
  // Start outside the hysteresis window so the first decision is free.
  std::size_t steps_since_switch = cfg.policy.hysteresis_steps;
  FeedbackTracker feedback(cfg.policy);

  SimTrace trace;
  trace.seed = cfg.link.seed;
  trace.mode_rule = cfg.mode_rule;
  trace.steps.reserve(cfg.steps);

  for (std::size_t s = 0; s < cfg.steps; ++s) {
    if (s > 0) {
      state = link_step(cfg.link, state, rng);
      if (steps_since_switch < cfg.policy.hysteresis_steps) {
        ++steps_since_switch;
      }
      if (s % cfg.policy.feedback_period == 0) feedback.refresh();
    }

    SimStep step;
    step.step = s;
    step.window = s % stream.size();
    step.link_state = state;

    if (cfg.mode_rule == ModeRule::kAdaptive) {
      const cascade::Mode decided =
          policy_decide(cfg.policy, state, feedback.view_compressed(),
                        steps_since_switch, mode);
      if (decided != mode) {
        mode = decided;
        step.switched = true;
        steps_since_switch = 0;
      }
    }
    step.mode = mode;

    const Eigen::MatrixXd& latents =
        mode == cascade::Mode::kInformative ? latent_info : latent_comp;
    const Eigen::VectorXd latent =
        latents.row(static_cast<Eigen::Index>(step.window)).transpose();

    const std::vector<std::uint8_t> message = encode_message(mode, latent);
    step.payload_bytes = message.size() - 5;
    step.latency = static_cast<double>(step.payload_bytes) /
                       cfg.link.bandwidth(state) +
                   cfg.link.base_latency;

    // Edge side: deserialize and decode the received (float32) latent.
    const WireMessage received = decode_message(message);
    Eigen::MatrixXd received_latent(
        1, static_cast<Eigen::Index>(received.payload.size()));
    for (std::size_t i = 0; i < received.payload.size(); ++i) {
      received_latent(0, static_cast<Eigen::Index>(i)) =
          static_cast<double>(received.payload[i]);
    }
    const Eigen::MatrixXd probs = cascade::decode_from_latent(
        model, received_latent, received.mode, stream.t_len);

    const auto& targets = stream.windows[step.window].targets;
    step.total_timesteps = stream.t_len;
    for (std::size_t t = 0; t < stream.t_len; ++t) {
      if (argmax_row(probs, static_cast<Eigen::Index>(t)) ==
          static_cast<std::size_t>(targets[t])) {
        ++step.correct_timesteps;
      }
    }
    step.accuracy = static_cast<double>(step.correct_timesteps) /
                    static_cast<double>(step.total_timesteps);

    feedback.observe(mode, step.correct_timesteps, step.total_timesteps);
    trace.steps.push_back(step);
  }

  trace.aggregates = compute_aggregates(trace.steps);
  return trace;
}

void write_trace_csv(const SimTrace& trace,
                     const std::filesystem::path& path) {
  data::CsvWriter writer(
      path, {"step", "window", "link_state", "mode", "switched",
             "payload_bytes", "latency", "correct_timesteps",
             "total_timesteps", "accuracy"});
  for (const SimStep& s : trace.steps) {
    writer.write_row({std::to_string(s.step), std::to_string(s.window),
                      link_state_name(s.link_state), cascade::mode_name(s.mode),
                      s.switched ? "1" : "0", std::to_string(s.payload_bytes),
                      data::format_double(s.latency),
                      std::to_string(s.correct_timesteps),
                      std::to_string(s.total_timesteps),
                      data::format_double(s.accuracy)});
  }
  writer.close();
}

}  // namespace ibsplit::sim
