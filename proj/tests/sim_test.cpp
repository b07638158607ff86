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

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"

#include "ibsplit/cascade/cascade.hpp"
#include "ibsplit/common/error.hpp"
#include "ibsplit/data/synth.hpp"
#include "ibsplit/sim/link.hpp"
#include "ibsplit/sim/simulator.hpp"
#include "ibsplit/sim/wire.hpp"

using ibsplit::cascade::Mode;
using ibsplit::sim::LinkModel;
using ibsplit::sim::LinkState;
using ibsplit::sim::ModeRule;
using ibsplit::sim::OrchestratorPolicy;
using ibsplit::sim::SimConfig;
using ibsplit::testutil::scratch_dir;

namespace {

struct SimFixture {
  ibsplit::data::SplitDataset data;
  ibsplit::cascade::CascadeModel model;
};

/// Untrained (but deterministic) 8-cell/2-cell cascade over a tiny stream.
SimFixture make_fixture() {
  ibsplit::data::SynthConfig synth;
  synth.n_windows = 160;
  synth.runs = 2;
  synth.t_len = 6;
  synth.n_features = 3;
  synth.n_classes = 3;
  synth.label_window = 6;
  const auto ds = ibsplit::data::synth_generate(synth);
  ibsplit::data::SplitConfig split_cfg;
  split_cfg.test_fraction = 0.25;
  SimFixture fx{ibsplit::data::build_split_dataset(
                    ds.rows, ibsplit::data::synth_schema(synth), split_cfg),
                {}};

  ibsplit::cascade::CascadeConfig cfg;
  cfg.phase1_cells = {8};
  cfg.bottleneck_cells = 2;
  cfg.epochs_phase1 = 1;
  cfg.probe_size = 16;
  cfg.seed = 5;
  ibsplit::cascade::CascadeTrainer trainer(fx.data.train, cfg);
  trainer.train_phase1();
  trainer.augment();
  trainer.train_phase2();
  fx.model = trainer.take_model();
  return fx;
}

SimConfig quiet_config(std::size_t steps) {
  SimConfig cfg;
  cfg.link.p_nc = 0.0;
  cfg.link.p_cn = 0.0;
  cfg.link.seed = 3;
  cfg.steps = steps;
  return cfg;
}

}  // namespace

// ---------------------------------------------------------------------------
// link model

TEST_CASE("link: zero congestion probability keeps the link normal "
          "[TRIVIAL]") {
  LinkModel link;
  link.p_nc = 0.0;
  std::mt19937_64 rng(link.seed);
  LinkState state = LinkState::kNormal;
  for (int i = 0; i < 2000; ++i) {
    state = ibsplit::sim::link_step(link, state, rng);
    CHECK(state == LinkState::kNormal);
  }
}

TEST_CASE("link: transition probabilities of 1 alternate deterministically "
          "[TRIVIAL]") {
  LinkModel link;
  link.p_nc = 1.0;
  link.p_cn = 1.0;
  std::mt19937_64 rng(9);
  LinkState state = LinkState::kNormal;
  for (int i = 0; i < 50; ++i) {
    const LinkState next = ibsplit::sim::link_step(link, state, rng);
    CHECK(next != state);
    state = next;
  }
}

TEST_CASE("link: empirical occupancy matches the stationary distribution "
          "[DERIVED]") {
  // For a two-state chain, pi(congested) = p_nc / (p_nc + p_cn) = 0.25.
  LinkModel link;
  link.p_nc = 0.1;
  link.p_cn = 0.3;
  std::mt19937_64 rng(17);
  LinkState state = LinkState::kNormal;
  std::size_t congested = 0;
  const std::size_t steps = 100000;
  for (std::size_t i = 0; i < steps; ++i) {
    state = ibsplit::sim::link_step(link, state, rng);
    if (state == LinkState::kCongested) ++congested;
  }
  const double freq = static_cast<double>(congested) /
                      static_cast<double>(steps);
  CHECK(std::abs(freq - 0.25) < 0.02);
}

TEST_CASE("link: the step consumes exactly one variate, so traces are "
          "reproducible [TRIVIAL]") {
  LinkModel link;
  std::mt19937_64 a(42), b(42);
  LinkState state = LinkState::kNormal;
  for (int i = 0; i < 100; ++i) {
    state = ibsplit::sim::link_step(link, state, a);
    (void)b();  // consume one draw in lockstep
  }
  CHECK(a() == b());
}

TEST_CASE("link: state names round-trip and invalid bandwidth orders are "
          "rejected [TRIVIAL]") {
  CHECK(ibsplit::sim::link_state_from_name("normal") == LinkState::kNormal);
  CHECK(ibsplit::sim::link_state_from_name("congested") ==
        LinkState::kCongested);
  CHECK(ibsplit::sim::link_state_name(LinkState::kCongested) == "congested");
  LinkModel link;
  link.bytes_congested = link.bytes_normal;  // must be strictly smaller
  CHECK_THROWS_AS(link.validate(), ibsplit::ConfigError);
}

// ---------------------------------------------------------------------------
// orchestrator policy

TEST_CASE("policy: a normal link always selects Informative [TRIVIAL]") {
  OrchestratorPolicy policy;
  for (double acc : {0.0, 0.6, 1.0}) {
    CHECK(ibsplit::sim::policy_decide(policy, LinkState::kNormal, acc,
                                      policy.hysteresis_steps,
                                      Mode::kCompressed) ==
          Mode::kInformative);
  }
}

TEST_CASE("policy: congestion with accuracy above the floor selects "
          "Compressed [TRIVIAL]") {
  OrchestratorPolicy policy;
  policy.accuracy_floor = 0.5;
  CHECK(ibsplit::sim::policy_decide(policy, LinkState::kCongested, 0.9,
                                    policy.hysteresis_steps,
                                    Mode::kInformative) == Mode::kCompressed);
  // Exactly at the floor still qualifies.
  CHECK(ibsplit::sim::policy_decide(policy, LinkState::kCongested, 0.5,
                                    policy.hysteresis_steps,
                                    Mode::kInformative) == Mode::kCompressed);
  // Below the floor the orchestrator keeps the Informative code.
  CHECK(ibsplit::sim::policy_decide(policy, LinkState::kCongested, 0.49,
                                    policy.hysteresis_steps,
                                    Mode::kInformative) == Mode::kInformative);
}

TEST_CASE("policy: hysteresis blocks a switch until the window expires "
          "[TRIVIAL]") {
  OrchestratorPolicy policy;
  policy.hysteresis_steps = 10;
  CHECK(ibsplit::sim::policy_decide(policy, LinkState::kCongested, 1.0, 9,
                                    Mode::kInformative) == Mode::kInformative);
  CHECK(ibsplit::sim::policy_decide(policy, LinkState::kCongested, 1.0, 10,
                                    Mode::kInformative) == Mode::kCompressed);
  // Staying in the current mode is never blocked.
  CHECK(ibsplit::sim::policy_decide(policy, LinkState::kCongested, 1.0, 0,
                                    Mode::kCompressed) == Mode::kCompressed);
}

TEST_CASE("policy: mode rule names round-trip [TRIVIAL]") {
  for (ModeRule rule : {ModeRule::kAdaptive, ModeRule::kForcedInformative,
                        ModeRule::kForcedCompressed}) {
    CHECK(ibsplit::sim::mode_rule_from_name(
              ibsplit::sim::mode_rule_name(rule)) == rule);
  }
  CHECK_THROWS_AS(ibsplit::sim::mode_rule_from_name("sometimes"),
                  ibsplit::ConfigError);
}

// ---------------------------------------------------------------------------
// wire format

TEST_CASE("wire: encode/decode round-trips the float32 payload exactly "
          "[TRIVIAL]") {
  Eigen::VectorXd latent(4);
  latent << 0.5, -1.25, 3.0e-7, 19.75;
  for (Mode mode : {Mode::kInformative, Mode::kCompressed}) {
    const auto bytes = ibsplit::sim::encode_message(mode, latent);
    REQUIRE(bytes.size() == 5 + 4 * 4);
    CHECK(bytes[0] == (mode == Mode::kInformative ? 0 : 1));
    // Little-endian element count.
    CHECK(bytes[1] == 4);
    CHECK(bytes[2] == 0);
    CHECK(bytes[3] == 0);
    CHECK(bytes[4] == 0);
    const auto message = ibsplit::sim::decode_message(bytes);
    CHECK(message.mode == mode);
    REQUIRE(message.payload.size() == 4);
    for (int i = 0; i < 4; ++i) {
      CHECK(message.payload[static_cast<std::size_t>(i)] ==
            static_cast<float>(latent(i)));
    }
  }
}

TEST_CASE("wire: malformed buffers are rejected [TRIVIAL]") {
  Eigen::VectorXd latent(3);
  latent << 1.0, 2.0, 3.0;
  auto bytes = ibsplit::sim::encode_message(Mode::kInformative, latent);

  auto bad_tag = bytes;
  bad_tag[0] = 7;
  CHECK_THROWS_AS(ibsplit::sim::decode_message(bad_tag), ibsplit::DataError);

  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(ibsplit::sim::decode_message(truncated),
                  ibsplit::DataError);

  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(ibsplit::sim::decode_message(trailing), ibsplit::DataError);

  CHECK_THROWS_AS(ibsplit::sim::decode_message({}), ibsplit::DataError);
  CHECK_THROWS_AS(ibsplit::sim::decode_message({0, 1}), ibsplit::DataError);
}

TEST_CASE("wire: payload accounting is dimension x 4 bytes, header excluded "
          "[TRIVIAL]") {
  const auto fx = make_fixture();
  const std::size_t info =
      ibsplit::sim::payload_bytes(Mode::kInformative, fx.model);
  const std::size_t comp =
      ibsplit::sim::payload_bytes(Mode::kCompressed, fx.model);
  CHECK(info == fx.model.informative_dim() * 4);
  CHECK(comp == fx.model.compressed_dim() * 4);
  CHECK(comp < info);
}

// ---------------------------------------------------------------------------
// simulation runs

TEST_CASE("run: an empty stream is a data error [TRIVIAL]") {
  const auto fx = make_fixture();
  ibsplit::data::Dataset empty;
  empty.t_len = fx.data.test.t_len;
  empty.n_features = fx.data.test.n_features;
  empty.n_classes = fx.data.test.n_classes;
  CHECK_THROWS_AS(ibsplit::sim::run(fx.model, empty, quiet_config(10)),
                  ibsplit::DataError);
}

TEST_CASE("run: compressed modes require a bottleneck [TRIVIAL]") {
  const auto fx = make_fixture();
  ibsplit::cascade::CascadeModel no_bottleneck = fx.model;
  no_bottleneck.has_bottleneck = false;
  no_bottleneck.encoder.pop_back();
  SimConfig cfg = quiet_config(5);
  cfg.mode_rule = ModeRule::kForcedCompressed;
  CHECK_THROWS_AS(ibsplit::sim::run(no_bottleneck, fx.data.test, cfg),
                  ibsplit::ConfigError);
  cfg.mode_rule = ModeRule::kForcedInformative;
  const auto trace = ibsplit::sim::run(no_bottleneck, fx.data.test, cfg);
  CHECK(trace.steps.size() == 5);
}

TEST_CASE("run: forced-Informative pooled accuracy equals the batched "
          "evaluation [DERIVED]") {
  const auto fx = make_fixture();
  SimConfig cfg = quiet_config(fx.data.test.size());
  cfg.mode_rule = ModeRule::kForcedInformative;
  const auto trace = ibsplit::sim::run(fx.model, fx.data.test, cfg);

  std::vector<std::size_t> all(fx.data.test.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto batch = ibsplit::data::make_batch(fx.data.test, all);
  const auto stats =
      ibsplit::cascade::evaluate(fx.model, batch, Mode::kInformative);
  CHECK(trace.aggregates.accuracy == stats.accuracy);
  CHECK(trace.aggregates.steps_compressed == 0);
  CHECK(trace.aggregates.accuracy_compressed == 0.0);
}

TEST_CASE("run: forced byte ratio is exactly compressed/informative "
          "dimensions [DERIVED]") {
  const auto fx = make_fixture();
  SimConfig cfg = quiet_config(200);
  cfg.mode_rule = ModeRule::kForcedInformative;
  const auto info = ibsplit::sim::run(fx.model, fx.data.test, cfg);
  cfg.mode_rule = ModeRule::kForcedCompressed;
  const auto comp = ibsplit::sim::run(fx.model, fx.data.test, cfg);

  // 2 cells vs 8 cells, 4 bytes each, header excluded: exactly 1/4.
  CHECK(info.aggregates.total_bytes == 200 * 8 * 4);
  CHECK(comp.aggregates.total_bytes == 200 * 2 * 4);
  const double ratio = static_cast<double>(comp.aggregates.total_bytes) /
                       static_cast<double>(info.aggregates.total_bytes);
  CHECK(ratio == 0.25);
}

TEST_CASE("run: adaptive traffic under mixed congestion sits strictly "
          "between the forced modes [DERIVED]") {
  const auto fx = make_fixture();
  SimConfig cfg;
  cfg.link.p_nc = 0.5;
  cfg.link.p_cn = 0.5;
  cfg.link.seed = 21;
  cfg.steps = 400;
  cfg.policy.accuracy_floor = 0.0;  // compressed always eligible
  cfg.policy.hysteresis_steps = 1;

  cfg.mode_rule = ModeRule::kAdaptive;
  const auto adaptive = ibsplit::sim::run(fx.model, fx.data.test, cfg);
  cfg.mode_rule = ModeRule::kForcedInformative;
  const auto info = ibsplit::sim::run(fx.model, fx.data.test, cfg);
  cfg.mode_rule = ModeRule::kForcedCompressed;
  const auto comp = ibsplit::sim::run(fx.model, fx.data.test, cfg);

  CHECK(adaptive.aggregates.total_bytes < info.aggregates.total_bytes);
  CHECK(adaptive.aggregates.total_bytes > comp.aggregates.total_bytes);
  CHECK(adaptive.aggregates.steps_informative > 0);
  CHECK(adaptive.aggregates.steps_compressed > 0);
  CHECK(adaptive.aggregates.switch_count > 0);
}

TEST_CASE("run: switches respect the hysteresis window [DERIVED]") {
  const auto fx = make_fixture();
  SimConfig cfg;
  cfg.link.p_nc = 0.5;
  cfg.link.p_cn = 0.5;
  cfg.link.seed = 33;
  cfg.steps = 600;
  cfg.policy.accuracy_floor = 0.0;
  cfg.policy.hysteresis_steps = 7;
  cfg.mode_rule = ModeRule::kAdaptive;

  const auto trace = ibsplit::sim::run(fx.model, fx.data.test, cfg);
  long last_switch = -1;
  std::size_t switches = 0;
  for (const auto& s : trace.steps) {
    if (!s.switched) continue;
    ++switches;
    if (last_switch >= 0) {
      CHECK(static_cast<long>(s.step) - last_switch >=
            static_cast<long>(cfg.policy.hysteresis_steps));
    }
    last_switch = static_cast<long>(s.step);
  }
  CHECK(switches == trace.aggregates.switch_count);
}

TEST_CASE("run: aggregates recompute bit-exactly from the rows [TRIVIAL]") {
  const auto fx = make_fixture();
  SimConfig cfg;
  cfg.link.seed = 4;
  cfg.steps = 250;
  cfg.policy.accuracy_floor = 0.0;
  cfg.mode_rule = ModeRule::kAdaptive;
  const auto trace = ibsplit::sim::run(fx.model, fx.data.test, cfg);
  CHECK(ibsplit::sim::compute_aggregates(trace.steps) == trace.aggregates);
  // Latency of every step is payload/bandwidth + base latency.
  for (const auto& s : trace.steps) {
    const double expect = static_cast<double>(s.payload_bytes) /
                              cfg.link.bandwidth(s.link_state) +
                          cfg.link.base_latency;
    CHECK(s.latency == expect);
  }
}

TEST_CASE("run: reruns produce byte-identical trace files and equal "
          "aggregates [TRIVIAL]") {
  const auto fx = make_fixture();
  const auto dir = scratch_dir("sim_repro");
  SimConfig cfg;
  cfg.link.p_nc = 0.3;
  cfg.link.p_cn = 0.4;
  cfg.link.seed = 77;
  cfg.steps = 300;
  cfg.mode_rule = ModeRule::kAdaptive;

  const auto a = ibsplit::sim::run(fx.model, fx.data.test, cfg);
  const auto b = ibsplit::sim::run(fx.model, fx.data.test, cfg);
  CHECK(a.aggregates == b.aggregates);
  ibsplit::sim::write_trace_csv(a, dir / "a.csv");
  ibsplit::sim::write_trace_csv(b, dir / "b.csv");
  const std::string text_a = ibsplit::testutil::read_file(dir / "a.csv");
  CHECK(text_a == ibsplit::testutil::read_file(dir / "b.csv"));
  CHECK(text_a.find("step,window,link_state,mode") == 0);
}

TEST_CASE("run: the summary echoes the seed and the mode rule [TRIVIAL]") {
  const auto fx = make_fixture();
  SimConfig cfg = quiet_config(20);
  cfg.link.seed = 12345;
  const auto trace = ibsplit::sim::run(fx.model, fx.data.test, cfg);
  const nlohmann::json j = trace.summary_json();
  CHECK(j["seed"] == 12345);
  CHECK(j["mode_rule"] == "adaptive");
  CHECK(j["steps"] == 20);
  CHECK(j.contains("total_bytes"));
  CHECK(j.contains("mean_latency"));
  CHECK(j.contains("accuracy"));
  CHECK(j.contains("switch_count"));
}

TEST_CASE("run: the stream is consumed cyclically [TRIVIAL]") {
  const auto fx = make_fixture();
  const std::size_t n = fx.data.test.size();
  SimConfig cfg = quiet_config(n + 3);
  const auto trace = ibsplit::sim::run(fx.model, fx.data.test, cfg);
  REQUIRE(trace.steps.size() == n + 3);
  CHECK(trace.steps[0].window == 0);
  CHECK(trace.steps[n].window == 0);
  CHECK(trace.steps[n + 1].window == 1);
}

TEST_CASE("run: mismatched stream dimensions are a shape error [TRIVIAL]") {
  const auto fx = make_fixture();
  ibsplit::data::Dataset wrong = fx.data.test;
  wrong.n_features += 1;
  CHECK_THROWS_AS(ibsplit::sim::run(fx.model, wrong, quiet_config(5)),
                  ibsplit::ShapeError);
}

TEST_CASE("sim config: JSON round-trip [TRIVIAL]") {
  SimConfig cfg;
  cfg.link.p_nc = 0.2;
  cfg.link.p_cn = 0.6;
  cfg.link.bytes_normal = 5000.0;
  cfg.link.bytes_congested = 100.0;
  cfg.link.seed = 9;
  cfg.policy.accuracy_floor = 0.75;
  cfg.policy.hysteresis_steps = 4;
  cfg.steps = 77;
  cfg.mode_rule = ModeRule::kForcedCompressed;
  const SimConfig back = SimConfig::from_json(cfg.to_json());
  CHECK(back.link.p_nc == cfg.link.p_nc);
  CHECK(back.link.p_cn == cfg.link.p_cn);
  CHECK(back.link.bytes_normal == cfg.link.bytes_normal);
  CHECK(back.link.seed == cfg.link.seed);
  CHECK(back.policy.accuracy_floor == cfg.policy.accuracy_floor);
  CHECK(back.policy.hysteresis_steps == cfg.policy.hysteresis_steps);
  CHECK(back.steps == cfg.steps);
  CHECK(back.mode_rule == cfg.mode_rule);
}
