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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ibsplit/mi/discrete.hpp"
#include "ibsplit/mi/gcmi.hpp"
#include "ibsplit/mi/kde.hpp"
#include "ibsplit/nn/network.hpp"
#include "ibsplit/sim/link.hpp"
#include "ibsplit/sim/wire.hpp"

namespace {

ibsplit::nn::Batch random_batch(std::size_t n, std::size_t t_len,
                                std::size_t dim, std::size_t classes,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  ibsplit::nn::Batch batch;
  batch.x = ibsplit::nn::BatchSeq(n, t_len, dim);
  for (Eigen::Index r = 0; r < batch.x.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < batch.x.values.cols(); ++c) {
      batch.x.values(r, c) = g(rng);
    }
  }
  std::uniform_int_distribution<int> label(0, static_cast<int>(classes) - 1);
  batch.y.resize(n * t_len);
  for (int& y : batch.y) y = label(rng);
  return batch;
}

ibsplit::mi::SampleMatrix random_matrix(std::size_t n, std::size_t d,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  ibsplit::mi::SampleMatrix m(static_cast<Eigen::Index>(n),
                              static_cast<Eigen::Index>(d));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = g(rng);
  }
  return m;
}

void BM_LstmForward(benchmark::State& state) {
  std::mt19937_64 rng(1);
  auto model = ibsplit::nn::SeqModel::build(11, 20, {128, 128}, {}, 8, rng);
  const auto batch = random_batch(64, 20, 11, 8, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.forward(batch.x));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 64);
}
BENCHMARK(BM_LstmForward)->Unit(benchmark::kMillisecond);

void BM_LstmBackward(benchmark::State& state) {
  std::mt19937_64 rng(1);
  auto model = ibsplit::nn::SeqModel::build(11, 20, {128, 128}, {}, 8, rng);
  const auto batch = random_batch(64, 20, 11, 8, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ibsplit::nn::backward(model, batch));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 64);
}
BENCHMARK(BM_LstmBackward)->Unit(benchmark::kMillisecond);

void BM_Gcmi(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = random_matrix(n, 8, 3);
  const auto y = random_matrix(n, 8, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ibsplit::mi::gcmi(x, y));
  }
}
BENCHMARK(BM_Gcmi)->Arg(512)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_KdeMiLabel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = random_matrix(n, 16, 5);
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> label(0, 7);
  std::vector<int> y(n);
  for (int& v : y) v = label(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ibsplit::mi::kde_mi_label(y, x));
  }
}
BENCHMARK(BM_KdeMiLabel)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_PluginDiscrete(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> sym(0, 29);
  std::vector<int> x(100000), y(100000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = sym(rng);
    y[i] = (x[i] + sym(rng)) % 30;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(ibsplit::mi::plugin_discrete_mi(x, y));
  }
}
BENCHMARK(BM_PluginDiscrete)->Unit(benchmark::kMillisecond);

void BM_WireRoundTrip(benchmark::State& state) {
  const Eigen::VectorXd latent = Eigen::VectorXd::Random(128);
  for (auto _ : state) {
    const auto bytes = ibsplit::sim::encode_message(
        ibsplit::cascade::Mode::kInformative, latent);
    benchmark::DoNotOptimize(ibsplit::sim::decode_message(bytes));
  }
}
BENCHMARK(BM_WireRoundTrip);

void BM_LinkStep(benchmark::State& state) {
  ibsplit::sim::LinkModel link;
  std::mt19937_64 rng(link.seed);
  auto s = ibsplit::sim::LinkState::kNormal;
  for (auto _ : state) {
    s = ibsplit::sim::link_step(link, s, rng);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_LinkStep);

}  // namespace

BENCHMARK_MAIN();
